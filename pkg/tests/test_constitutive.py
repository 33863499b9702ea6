"""Tests for the material model, equations of state and unknown layout.

Tests cover:
- EOS evaluation for the gamma law and the stiffened gas
- EOS inversions for entropy and density
- Density from the deformation gradient and its failure modes
- Index map of U = (p, v, F, S) and split/assemble consistency
- Cauchy stress symmetry and the at-rest constructor
- Backward-difference weights and the trace history buffer
"""

import numpy as np
import pytest

from app.core.errors import (
    ConfigurationError,
    InsufficientHistory,
    InvalidDensity,
    NegativeTargetPressure,
    NonOrientationPreserving,
    ThermoelasticValidationError,
)
from app.models.history import TraceHistory, backward_difference_weights
from app.models.layout import UnknownLayout
from app.models.material import EOSKind, MaterialParams, eos_eval
from app.models.thermo_state import ThermoState, cauchy_stress, density_from_F, internal_energy


class TestMaterialParams:
    """Validation of material parameters"""

    def test_defaults(self):
        params = MaterialParams()
        assert params.dim == 2
        assert params.elastic == (1.0, 1.0)
        assert params.n_unknowns == 8
        assert params.is_unit_elastic

    def test_three_dimensional_unknown_count(self):
        assert MaterialParams(dim=3).n_unknowns == 14

    @pytest.mark.parametrize("kwargs", [
        {"dim": 4},
        {"gamma": 1.0},
        {"p_inf": -1.0},
        {"elastic": (1.0,)},
        {"elastic": (1.0, 0.0)},
        {"rho_ref": 2.0},
    ])
    def test_invalid_parameters_rejected(self, kwargs):
        with pytest.raises(ConfigurationError):
            MaterialParams(**kwargs)

    def test_configuration_error_is_value_error(self):
        with pytest.raises(ValueError):
            MaterialParams(gamma=0.5)


class TestEquationOfState:
    """EOS evaluation contract"""

    def test_gamma_law_reference_point(self, params_2d):
        vals = eos_eval(1.0, 0.0, params_2d)
        assert float(vals.pressure) == pytest.approx(1.0)
        assert float(vals.sound_speed_sq) == pytest.approx(1.4)
        assert float(vals.energy) == pytest.approx(2.5)
        assert float(vals.temperature) == pytest.approx(2.5)

    def test_pressure_scales_with_density(self, params_2d):
        p = params_2d.eos().pressure(2.0, 0.0)
        assert float(p) == pytest.approx(2.0 ** 1.4)

    def test_stiffened_gas_shifts_pressure(self):
        params = MaterialParams(dim=2, gamma=1.4, eos_kind=EOSKind.STIFFENED_GAS, p_inf=0.5)
        vals = params.eos().evaluate(1.0, 0.0)
        assert float(vals.pressure) == pytest.approx(0.5)
        assert float(vals.energy) == pytest.approx(3.0)
        # same bulk modulus as the gamma law
        assert float(vals.sound_speed_sq) == pytest.approx(1.4)

    def test_p_inf_ignored_for_gamma_law(self):
        params = MaterialParams(dim=2, gamma=1.4, eos_kind=EOSKind.GAMMA_LAW, p_inf=0.5)
        assert float(params.eos().pressure(1.0, 0.0)) == pytest.approx(1.0)

    def test_bulk_modulus_matches_rho_c2(self, params_2d):
        eos = params_2d.eos()
        rho, S = 1.7, 0.3
        assert float(eos.bulk_modulus(rho, S)) == pytest.approx(rho * float(eos.sound_speed_sq(rho, S)))

    def test_bulk_modulus_derivatives_by_finite_differences(self, params_2d):
        eos = params_2d.eos()
        rho, S, h = 1.3, -0.2, 1e-6
        k_rho, k_s = eos.bulk_modulus_derivatives(rho, S)
        fd_rho = (eos.bulk_modulus(rho + h, S) - eos.bulk_modulus(rho - h, S)) / (2 * h)
        fd_s = (eos.bulk_modulus(rho, S + h) - eos.bulk_modulus(rho, S - h)) / (2 * h)
        assert float(k_rho) == pytest.approx(float(fd_rho), rel=1e-7)
        assert float(k_s) == pytest.approx(float(fd_s), rel=1e-7)

    def test_entropy_inversion_round_trip(self, params_2d):
        eos = params_2d.eos()
        S = eos.entropy_from_pressure(2.0, 0.5)
        assert float(S) == pytest.approx(np.log(0.5) - 1.4 * np.log(2.0))
        assert float(eos.pressure(2.0, S)) == pytest.approx(0.5)

    def test_density_inversion_round_trip(self, params_2d):
        eos = params_2d.eos()
        rho = eos.density_from_pressure(0.8, 0.1)
        assert float(eos.pressure(rho, 0.1)) == pytest.approx(0.8)

    def test_nonpositive_density_rejected(self, params_2d):
        with pytest.raises(InvalidDensity):
            params_2d.eos().evaluate(0.0, 0.0)

    def test_pressure_outside_range_rejected(self, params_2d):
        with pytest.raises(NegativeTargetPressure):
            params_2d.eos().entropy_from_pressure(1.0, -0.1)


class TestThermoState:
    """Density, stress and vector conversion of a pointwise state"""

    def test_density_from_diagonal_F(self):
        assert float(density_from_F(np.diag([0.5, 1.0]))) == pytest.approx(2.0)

    def test_density_on_stack(self):
        F = np.stack([np.eye(2), 2.0 * np.eye(2)])
        np.testing.assert_allclose(density_from_F(F), [1.0, 0.25])

    def test_reflection_rejected(self):
        with pytest.raises(NonOrientationPreserving):
            density_from_F(np.diag([-1.0, 1.0]))

    def test_singular_F_rejected(self):
        with pytest.raises(ThermoelasticValidationError):
            density_from_F(np.zeros((3, 3)))

    def test_internal_energy_at_identity(self, params_2d):
        # elastic part 1 plus e(1, 0) = 2.5
        assert float(internal_energy(np.eye(2), 0.0, params_2d)) == pytest.approx(3.5)

    def test_at_rest_uses_eos_pressure(self, params_2d):
        state = ThermoState.at_rest(np.diag([0.5, 1.0]), params_2d)
        assert state.pressure == pytest.approx(2.0 ** 1.4)
        np.testing.assert_array_equal(state.velocity, [0.0, 0.0])

    def test_wrong_F_shape_rejected(self):
        with pytest.raises(ValueError):
            ThermoState(1.0, [0.0, 0.0], np.eye(3), 0.0)

    def test_vector_round_trip(self, rng):
        F = np.eye(3) + 0.1 * rng.normal(size=(3, 3))
        state = ThermoState(0.7, rng.normal(size=3), F, 0.2)
        back = ThermoState.from_vector(state.to_vector(), 3)
        np.testing.assert_array_equal(back.F, state.F)
        np.testing.assert_array_equal(back.velocity, state.velocity)
        assert back.pressure == state.pressure
        assert back.entropy == state.entropy

    def test_cauchy_stress_symmetric(self, rng, params_3d):
        F = np.eye(3) + 0.05 * rng.normal(size=(3, 3))
        state = ThermoState(1.0, np.zeros(3), F, 0.0)
        T = cauchy_stress(state, params_3d)
        np.testing.assert_allclose(T, T.T)

    def test_cauchy_stress_isotropic_at_rest(self, params_2d):
        state = ThermoState.at_rest(np.eye(2), params_2d)
        np.testing.assert_allclose(cauchy_stress(state, params_2d), np.zeros((2, 2)), atol=1e-15)


class TestUnknownLayout:
    """Column-major storage of F inside U"""

    def test_two_dimensional_names(self):
        assert UnknownLayout(2).names() == ["p", "v1", "v2", "F11", "F21", "F12", "F22", "S"]

    def test_indices(self):
        lay = UnknownLayout(3)
        assert lay.n == 14
        assert lay.p == 0
        assert lay.v(2) == 3
        assert lay.F(0, 0) == 4
        assert lay.F(2, 1) == 1 + 3 + 3 + 2
        assert lay.s == 13

    def test_split_assemble_consistent(self, rng):
        lay = UnknownLayout(2)
        U = rng.normal(size=(lay.n, 5, 4))
        p, v, F, S = lay.split(U)
        assert F.shape == (2, 2, 5, 4)
        np.testing.assert_array_equal(F[1, 0], U[lay.F(1, 0)])
        np.testing.assert_array_equal(lay.assemble(p, v, F, S), U)


class TestTraceHistory:
    """Backward differences over stored levels"""

    def test_first_order_weights(self):
        np.testing.assert_allclose(backward_difference_weights(1, 1.0), [1.5, -2.0, 0.5])

    def test_weights_scale_with_step(self):
        np.testing.assert_allclose(backward_difference_weights(2, 0.5),
                                   backward_difference_weights(2, 1.0) / 0.25)

    def test_zeroth_order_is_identity(self):
        np.testing.assert_array_equal(backward_difference_weights(0, 0.1), [1.0])

    def test_quadratic_second_derivative_exact(self):
        h = TraceHistory(depth=4, dt=0.1)
        for k in range(4):
            t = 0.1 * k
            h.append(t, np.array([t * t]))
        assert float(h.derivative(2)[0]) == pytest.approx(2.0)

    def test_insufficient_history(self):
        h = TraceHistory(depth=3, dt=0.1)
        h.append(0.0, np.zeros(1))
        with pytest.raises(InsufficientHistory):
            h.derivative(1)

    def test_depth_limits_levels(self):
        h = TraceHistory(depth=2, dt=1.0)
        for t in range(5):
            h.append(float(t), np.array([float(t)]))
        assert len(h) == 2
        assert h.time == 4.0

    def test_invalid_spacing(self):
        with pytest.raises(ConfigurationError):
            TraceHistory(depth=2, dt=0.0)
