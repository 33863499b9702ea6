"""Tests for the interface layer.

Tests cover:
- Background construction, its jump relation and admissibility checks
- Rankine-Hugoniot residual of backgrounds and of mismatched traces
- varrho and its gradient, general versus varrho boundary operator
- Pointwise and field evaluation of the boundary operator
- Rigidity probe bookkeeping and reproducibility
"""

import numpy as np
import pytest

from app.core.errors import (
    ConfigurationError,
    ConstraintViolated,
    NegativeTargetPressure,
    SingularMinor,
)
from app.models.front import FrontGeometry
from app.models.material import MaterialParams
from app.models.thermo_state import ThermoState
from app.services.interface import (
    BoundaryForm,
    GaussNewtonSolver,
    JumpState,
    boundary_operator,
    boundary_operator_field,
    build_background,
    rh_residual,
    rh_residual_names,
    rigidity_probe,
    varrho_eval,
)
from app.services.verification import constrained_jump_state, random_state


class TestBackground:
    """Piecewise-constant contact backgrounds"""

    def test_left_entropy_of_standard_example(self, background_2d):
        assert background_2d.s_minus == pytest.approx(-1.66355, abs=1e-5)

    def test_jump_relation_holds(self, background_2d):
        assert background_2d.jump_relation_residual() == pytest.approx(0.0, abs=1e-13)

    def test_rankine_hugoniot_satisfied(self, background_2d, params_2d):
        res = rh_residual(background_2d.traces(), params_2d)
        np.testing.assert_allclose(res, 0.0, atol=1e-12)

    def test_entropy_jumps_across_contact(self, background_2d):
        # a nontrivial contact carries an entropy jump
        assert abs(background_2d.s_minus - background_2d.entropy(+1)) > 1.0

    def test_zero_jump_is_trivial(self, params_2d):
        bg = build_background([1.0, 1.0], 1.0, 0.3, params_2d)
        assert bg.jump_f11 == 0.0
        assert bg.s_minus == pytest.approx(0.3)

    def test_three_dimensional_background(self, params_3d):
        bg = build_background([1.0, 1.0, 1.0], 0.7, 0.0, params_3d)
        np.testing.assert_allclose(rh_residual(bg.traces(), params_3d), 0.0, atol=1e-12)
        assert bg.vector(-1).shape == (14,)

    def test_to_dict_keys(self, background_2d):
        out = background_2d.to_dict()
        assert {"dim", "gamma", "eos", "plus", "minus", "jump_F11", "jump_relation_residual"} <= set(out)
        assert out["minus"]["F_diag"] == [0.5, 1.0]

    def test_compression_beyond_plus_rejected(self, params_2d):
        with pytest.raises(ConfigurationError):
            build_background([1.0, 1.0], 1.2, 0.0, params_2d)

    def test_wrong_stretch_count_rejected(self, params_2d):
        with pytest.raises(ConfigurationError):
            build_background([1.0, 1.0, 1.0], 0.5, 0.0, params_2d)

    def test_non_unit_elastic_rejected(self):
        params = MaterialParams(dim=2, elastic=(1.0, 2.0))
        with pytest.raises(ConfigurationError):
            build_background([1.0, 1.0], 0.5, 0.0, params)

    def test_inadmissible_left_pressure(self, params_2d):
        # p+ = 0.5^1.4 while rho+ F11+ [F11] = 1.5
        with pytest.raises(NegativeTargetPressure):
            build_background([2.0, 1.0], 0.5, 0.0, params_2d)


class TestJumpConditions:
    """Rankine-Hugoniot residual"""

    def test_residual_names_length(self, background_2d, params_2d):
        names = rh_residual_names(2)
        assert len(names) == rh_residual(background_2d.traces(), params_2d).size
        assert names[0] == "mass"
        assert "involution_1_12" in names

    def test_identical_traces_have_zero_residual(self, rng, params):
        js = constrained_jump_state(rng, params)
        same = JumpState(js.plus, js.plus, js.front)
        np.testing.assert_array_equal(rh_residual(same, params), 0.0)

    def test_pressure_mismatch_detected(self, params_2d):
        plus = ThermoState.at_rest(np.eye(2), params_2d)
        minus = ThermoState(plus.pressure + 0.1, [0.0, 0.0], np.eye(2), plus.entropy)
        res = rh_residual(JumpState(minus, plus, FrontGeometry.flat(2)), params_2d)
        names = rh_residual_names(2)
        assert res[names.index("momentum_1")] == pytest.approx(-0.1)


class TestVarrho:
    """varrho(F) and its gradient"""

    def test_two_dimensional_value_and_gradient(self):
        value, grad = varrho_eval(np.diag([1.0, 2.0]))
        assert float(value) == pytest.approx(0.5)
        assert float(grad[1, 1]) == pytest.approx(-0.25)
        assert float(grad[0, 0]) == 0.0

    def test_three_dimensional_value(self):
        value, _ = varrho_eval(np.diag([3.0, 2.0, 4.0]))
        assert float(value) == pytest.approx(0.125)

    def test_gradient_by_finite_differences(self, rng):
        F = np.eye(3) + 0.1 * rng.normal(size=(3, 3))
        _, grad = varrho_eval(F)
        h = 1e-6
        E = np.zeros((3, 3))
        E[1, 2] = h
        fd = (varrho_eval(F + E)[0] - varrho_eval(F - E)[0]) / (2 * h)
        assert float(grad[1, 2]) == pytest.approx(float(fd), rel=1e-6)

    def test_stack_evaluation(self):
        value, grad = varrho_eval(np.stack([np.diag([1.0, 2.0]), np.diag([1.0, 4.0])]))
        np.testing.assert_allclose(value, [0.5, 0.25])
        assert grad.shape == (2, 2, 2)

    def test_singular_minor_rejected(self):
        with pytest.raises(SingularMinor):
            varrho_eval(np.diag([1.0, 0.0]))


class TestBoundaryOperator:
    """Nonlinear boundary operator B(U+, U-, phi)"""

    def test_background_is_a_zero(self, background_2d, params_2d):
        B = boundary_operator(background_2d.traces(), params_2d)
        assert B.shape == (5,)
        np.testing.assert_allclose(B, 0.0, atol=1e-12)

    def test_forms_agree_on_constraint_manifold(self, rng, params):
        js = constrained_jump_state(rng, params)
        general = boundary_operator(js, params, BoundaryForm.GENERAL)
        varrho = boundary_operator(js, params, BoundaryForm.VARRHO)
        np.testing.assert_allclose(general, varrho, rtol=1e-12, atol=1e-12)

    def test_varrho_form_requires_constraint(self, params_2d):
        sheared = np.array([[1.0, 0.2], [0.0, 1.0]])
        plus = ThermoState.at_rest(sheared, params_2d)
        js = JumpState(plus, plus, FrontGeometry.flat(2))
        with pytest.raises(ConstraintViolated):
            boundary_operator(js, params_2d, BoundaryForm.VARRHO)
        np.testing.assert_allclose(boundary_operator(js, params_2d, BoundaryForm.GENERAL), 0.0)

    def test_field_form_matches_pointwise(self, rng, params):
        js = constrained_jump_state(rng, params)
        field = boundary_operator_field(
            js.minus.to_vector()[:, None],
            js.plus.to_vector()[:, None],
            js.front.grad_phi[:, None],
            np.array([float(js.front.dt_phi)]),
            params,
        )
        np.testing.assert_allclose(field[:, 0], boundary_operator(js, params), rtol=1e-12, atol=1e-12)

    def test_velocity_jump_rows(self, params_2d):
        plus = ThermoState.at_rest(np.eye(2), params_2d)
        minus = ThermoState(plus.pressure, [0.0, 0.3], np.eye(2), plus.entropy)
        B = boundary_operator(JumpState(minus, plus, FrontGeometry.flat(2)), params_2d)
        assert B[2] == pytest.approx(-0.3)
        assert B[1] == 0.0


class TestRigidityProbe:
    """Seeded Newton search for contacts without entropy jump"""

    @pytest.fixture
    def u_plus(self, params_2d):
        return ThermoState.at_rest(np.diag([1.0, 1.2]), params_2d, 0.1)

    def test_start_at_plus_trace_is_trivial_root(self, u_plus, params_2d):
        start = np.concatenate([u_plus.velocity, u_plus.F.reshape(-1, order="F")])
        report = rigidity_probe(u_plus, params_2d, starts=[start])
        trial = report.trials[0]
        assert trial.converged
        assert trial.iterations == 0
        assert trial.distance == 0.0
        assert report.summary()["statement"] == "no nontrivial root found"

    def test_summary_accounts_for_all_trials(self, u_plus, params_2d):
        report = rigidity_probe(u_plus, params_2d, trials=3, seed=7,
                                solver=GaussNewtonSolver(max_iter=20))
        summary = report.summary()
        assert summary["trials"] == 3
        assert summary["converged"] + summary["not_converged"] == 3
        assert summary["entropy_jump"] == 0.0
        assert [t.trial for t in report.trials] == [0, 1, 2]

    def test_threads_do_not_change_results(self, u_plus, params_2d):
        solver = GaussNewtonSolver(max_iter=10)
        serial = rigidity_probe(u_plus, params_2d, trials=4, seed=3, solver=solver)
        threaded = rigidity_probe(u_plus, params_2d, trials=4, seed=3, solver=solver, threads=2)
        assert [t.to_dict() for t in serial.trials] == [t.to_dict() for t in threaded.trials]

    def test_entropy_jump_moves_roots_away(self, u_plus, params_2d):
        report = rigidity_probe(u_plus, params_2d, trials=2, seed=1, entropy_jump=0.5,
                                solver=GaussNewtonSolver(max_iter=10))
        assert all(t.distance >= 0.5 for t in report.trials)

    def test_roots_carry_eos_pressure(self, u_plus, params_2d):
        report = rigidity_probe(u_plus, params_2d, trials=3, seed=11)
        for trial in report.converged:
            root = ThermoState.from_vector(np.append(trial.root, u_plus.entropy), 2)
            assert root.pressure == pytest.approx(float(params_2d.eos().pressure(root.density, root.entropy)))

    def test_no_nontrivial_root_without_entropy_jump(self, rng, params):
        for _ in range(3):
            report = rigidity_probe(random_state(rng, params), params, trials=20,
                                    seed=int(rng.integers(2 ** 32)))
            assert report.converged
            assert report.only_trivial_roots_found, [t.distance for t in report.nontrivial_roots]

    def test_background_found_with_entropy_jump(self, background_2d, params_2d):
        minus = background_2d.state(-1).to_vector()
        report = rigidity_probe(background_2d.state(+1), params_2d,
                                entropy_jump=background_2d.entropy(-1) - background_2d.entropy(+1),
                                starts=[minus[1:-1] * 1.01])
        trial = report.trials[0]
        assert trial.converged
        np.testing.assert_allclose(trial.root, minus[:-1], atol=1e-8)
        assert report.summary()["statement"] == "nontrivial roots found"
