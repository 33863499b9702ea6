"""Tests for the coefficient matrices of the symmetric system.

Tests cover:
- Dense A0 and A_i: symmetry, positivity, diagonal values at rest
- Matrix-free application agreeing with the dense matrices
- Expanded balance-law oracle against the symmetric assembly
- Straightened normal matrix and the degenerate-lift check
- Change of variables J, its inverse and the congruent matrices
- Entries of cal_A0..cal_A3 on backgrounds, and cal_A4 near them
- Boundary-matrix spectrum on contact traces
"""

import numpy as np
import pytest

from app.core.errors import DegenerateF1N, DegenerateLift, MassFluxNonzero
from app.models.front import FrontGeometry
from app.models.thermo_state import ThermoState
from app.services.hyperbolic import (
    LiftDerivatives,
    apply_A0,
    apply_A1tilde,
    apply_Ai,
    assemble_A,
    assemble_A0_dense,
    assemble_A1tilde,
    assemble_Ai_dense,
    assemble_J_and_calA,
    assemble_calA4,
    boundary_matrix_eigencheck,
    cluster_eigenvalues,
    dump_matrix_csv,
    expanded_residual,
    symmetric_residual,
    transform_J,
    transform_Jinv,
    zeroth_order_apply,
    zeroth_order_matrix,
)
from app.services.interface import build_background
from app.services.linearized.basic_state import build_basic_state
from app.services.verification import constrained_jump_state, random_state


@pytest.fixture
def state_vector(rng, params):
    return random_state(rng, params).to_vector()


class TestDenseMatrices:
    """Structure of A0 and A_i"""

    def test_A0_diagonal_at_rest(self, params_2d):
        mats = assemble_A(ThermoState.at_rest(np.eye(2), params_2d), params_2d)
        np.testing.assert_allclose(np.diag(mats[0]), [1 / 1.4, 1, 1, 1, 1, 1, 1, 1])
        assert len(mats) == 3

    def test_all_matrices_symmetric(self, state_vector, params):
        mats = [assemble_A0_dense(state_vector, params)]
        mats += [assemble_Ai_dense(state_vector, params, i) for i in range(params.dim)]
        for M in mats:
            np.testing.assert_allclose(M, M.T, rtol=0, atol=1e-14)

    def test_A0_positive_definite(self, state_vector, params):
        np.linalg.cholesky(assemble_A0_dense(state_vector, params))

    def test_batched_assembly(self, rng, params_2d):
        U = np.stack([random_state(rng, params_2d).to_vector() for _ in range(4)], axis=1)
        batch = assemble_Ai_dense(U, params_2d, 1)
        assert batch.shape == (4, 8, 8)
        np.testing.assert_allclose(batch[2], assemble_Ai_dense(U[:, 2], params_2d, 1))


class TestMatrixFree:
    """apply_* versus dense matrices"""

    def test_apply_A0(self, rng, state_vector, params):
        V = rng.normal(size=params.n_unknowns)
        np.testing.assert_allclose(apply_A0(state_vector, V, params),
                                   assemble_A0_dense(state_vector, params) @ V, rtol=1e-13)

    def test_apply_Ai(self, rng, state_vector, params):
        V = rng.normal(size=params.n_unknowns)
        for i in range(params.dim):
            np.testing.assert_allclose(apply_Ai(state_vector, V, params, i),
                                       assemble_Ai_dense(state_vector, params, i) @ V,
                                       rtol=1e-12, atol=1e-14)

    def test_apply_A1tilde(self, rng, state_vector, params):
        d = params.dim
        lift = LiftDerivatives(0.1, 1.2, 0.2 * np.ones(d - 1))
        V = rng.normal(size=params.n_unknowns)
        state = ThermoState.from_vector(state_vector, d)
        dense = assemble_A1tilde(state, lift, params)
        np.testing.assert_allclose(apply_A1tilde(state_vector, V, lift, params), dense @ V,
                                   rtol=1e-12, atol=1e-13)

    def test_flat_lift_gives_A1(self, state_vector, params):
        state = ThermoState.from_vector(state_vector, params.dim)
        np.testing.assert_allclose(assemble_A1tilde(state, LiftDerivatives.flat(params.dim), params),
                                   assemble_Ai_dense(state_vector, params, 0))

    def test_degenerate_lift_rejected(self, state_vector, params):
        state = ThermoState.from_vector(state_vector, params.dim)
        lift = LiftDerivatives(0.0, 1e-10, np.zeros(params.dim - 1))
        with pytest.raises(DegenerateLift):
            assemble_A1tilde(state, lift, params)


class TestExpandedOracle:
    """Symmetric form equals the row-weighted balance laws"""

    def test_residuals_agree(self, rng, state_vector, params):
        n = params.n_unknowns
        dt_U = rng.normal(size=n)
        grad_U = [rng.normal(size=n) for _ in range(params.dim)]
        np.testing.assert_allclose(symmetric_residual(state_vector, dt_U, grad_U, params),
                                   expanded_residual(state_vector, dt_U, grad_U, params),
                                   rtol=1e-12, atol=1e-12)

    def test_zeroth_order_is_linear(self, rng, state_vector, params):
        n = params.n_unknowns
        alpha = rng.normal(size=n)
        betas = [rng.normal(size=n) for _ in range(params.dim)]
        V1, V2 = rng.normal(size=n), rng.normal(size=n)
        lhs = zeroth_order_apply(state_vector, alpha, betas, 2.0 * V1 - V2, params)
        rhs = (2.0 * zeroth_order_apply(state_vector, alpha, betas, V1, params)
               - zeroth_order_apply(state_vector, alpha, betas, V2, params))
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_zeroth_order_matches_directional_derivative(self, rng, state_vector, params):
        n = params.n_unknowns
        alpha = rng.normal(size=n)
        betas = [rng.normal(size=n) for _ in range(params.dim)]
        V = rng.normal(size=n)
        h = 1e-6

        def operator(U):
            out = apply_A0(U, alpha, params)
            for i, beta in enumerate(betas):
                out = out + apply_Ai(U, beta, params, i)
            return out

        fd = (operator(state_vector + h * V) - operator(state_vector - h * V)) / (2 * h)
        np.testing.assert_allclose(zeroth_order_apply(state_vector, alpha, betas, V, params), fd,
                                   rtol=1e-5, atol=1e-6)


class TestChangeOfVariables:
    """J, J^{-1} and the congruent matrices"""

    def test_J_times_Jinv_is_identity(self, params):
        d = params.dim
        grad = np.linspace(0.1, 0.3, d - 1)
        J = transform_J(np.array(0.8), grad, d)
        Jinv = transform_Jinv(np.array(0.8), grad, d)
        np.testing.assert_allclose(J @ Jinv, np.eye(params.n_unknowns), atol=1e-14)

    def test_vanishing_normal_stretch_rejected(self):
        with pytest.raises(DegenerateF1N):
            transform_J(np.array(0.0), np.zeros(1), 2)

    def test_congruent_matrices_symmetric_and_A0_positive(self, state_vector, params):
        cal = assemble_J_and_calA(state_vector, LiftDerivatives.flat(params.dim), params)
        assert len(cal.cal_A) == params.dim + 1
        for M in cal.cal_A:
            np.testing.assert_allclose(M, np.swapaxes(M, -1, -2), atol=1e-14)
        np.linalg.cholesky(cal.cal_A[0])

    def test_boundary_part_matches_on_background(self, background_2d, params_2d):
        U = background_2d.vector(+1)
        cal = assemble_J_and_calA(U, LiftDerivatives.flat(2, +1.0), params_2d)
        np.testing.assert_allclose(cal.cal_A1b[1:5, 1:5], np.zeros((4, 4)), atol=1e-12)

    def test_calA4_without_J_derivatives(self, rng, state_vector, params):
        n = params.n_unknowns
        alpha = rng.normal(size=n)
        betas = [rng.normal(size=n) for _ in range(params.dim)]
        lift = LiftDerivatives.flat(params.dim)
        cal = assemble_J_and_calA(state_vector, lift, params)
        A4 = assemble_calA4(state_vector, alpha, betas, lift, params,
                            derivative=lambda field, i: np.zeros_like(field), coeffs=cal)
        C = zeroth_order_matrix(state_vector, alpha, betas, params)
        np.testing.assert_allclose(A4, cal.J.T @ C @ cal.J, rtol=1e-12, atol=1e-12)
        assert cal.cal_A4 is A4

    def test_calA4_time_derivative_of_J(self, rng, state_vector, params):
        n = params.n_unknowns
        lift = LiftDerivatives.flat(params.dim)
        cal = assemble_J_and_calA(state_vector, lift, params)
        dt_J = rng.normal(size=(n, n))
        zeros = np.zeros(n)
        A4 = assemble_calA4(state_vector, zeros, [zeros] * params.dim, lift, params,
                            derivative=lambda field, i: np.zeros_like(field), dt_J=dt_J, coeffs=cal)
        np.testing.assert_allclose(A4, cal.J.T @ cal.A0 @ dt_J, rtol=1e-12, atol=1e-12)

    def test_calA0_entries_on_background(self, background_2d, params_2d):
        cal = assemble_J_and_calA(background_2d.vector(+1), LiftDerivatives.flat(2), params_2d)
        expected = np.eye(8)
        expected[0, 0] = 1.0 / 1.4 + 1.0
        expected[0, 3] = expected[3, 0] = -1.0
        np.testing.assert_allclose(cal.cal_A[0], expected, atol=1e-14)
        assert cal.cal_A[0][0, 0] == pytest.approx(1.7142857142857, rel=1e-12)

    def test_calA0_minus_side_scales_with_density(self, background_2d, params_2d):
        # F11- = 0.5 gives rho- = 2 and r- = rho- F11- = 1
        cal = assemble_J_and_calA(background_2d.vector(-1), LiftDerivatives.flat(2, -1.0), params_2d)
        assert cal.cal_A[0][0, 0] == pytest.approx(1.0 / 1.4 + 2.0, rel=1e-12)
        assert cal.cal_A[0][0, 3] == pytest.approx(-2.0, rel=1e-12)

    def test_calA1_is_boundary_block_on_background(self, background_2d, params_2d):
        cal = assemble_J_and_calA(background_2d.vector(+1), LiftDerivatives.flat(2), params_2d)
        expected = np.zeros((8, 8))
        expected[1, 3] = expected[3, 1] = 1.0
        expected[2, 4] = expected[4, 2] = -1.0
        np.testing.assert_allclose(cal.cal_A[1], expected, atol=1e-14)
        np.testing.assert_allclose(cal.cal_A1b, 0.0, atol=1e-14)

    def test_calA2_entries_on_background(self, background_2d, params_2d):
        cal = assemble_J_and_calA(background_2d.vector(+1), LiftDerivatives.flat(2), params_2d)
        expected = np.zeros((8, 8))
        expected[0, 2] = expected[2, 0] = 1.0
        expected[1, 5] = expected[5, 1] = -1.0
        expected[2, 6] = expected[6, 2] = -1.0
        np.testing.assert_allclose(cal.cal_A[2], expected, atol=1e-14)

    def test_calA_entries_on_3d_background(self, params_3d):
        bg = build_background([1.0, 1.0, 1.0], 0.5, 0.0, params_3d)
        cal = assemble_J_and_calA(bg.vector(+1), LiftDerivatives.flat(3), params_3d)
        A0 = np.eye(14)
        A0[0, 0] = 1.0 / 1.4 + 1.0
        A0[0, 4] = A0[4, 0] = -1.0
        np.testing.assert_allclose(cal.cal_A[0], A0, atol=1e-14)
        for i in (2, 3):
            expected = np.zeros((14, 14))
            expected[0, i] = expected[i, 0] = 1.0
            for a in range(3):
                column = 4 + 3 * (i - 1) + a
                expected[1 + a, column] = expected[column, 1 + a] = -1.0
            np.testing.assert_allclose(cal.cal_A[i], expected, atol=1e-14)

    @staticmethod
    def _calA4(basic, sign):
        st = basic.stencils
        diffs = basic.derivatives(sign)

        def derivative(field, i):
            return st.d1(field) if i == 1 else st.dtan(field, i)

        return assemble_calA4(basic.field(sign), diffs.dt, diffs.d, basic.lift(sign).derivatives(),
                              basic.params, derivative)

    def test_calA4_vanishes_on_background(self, flat_basic):
        for sign in (-1, +1):
            np.testing.assert_allclose(self._calA4(flat_basic, sign), 0.0, atol=1e-12)

    def test_calA4_is_first_order_in_the_perturbation(self, background_2d, small_grid):
        sizes = []
        for eps in (1e-3, 2e-3):
            basic = build_basic_state(background_2d, small_grid, front_amplitude=eps,
                                      velocity_amplitude=eps, pressure_amplitude=eps)
            sizes.append(max(float(np.max(np.abs(self._calA4(basic, s)))) for s in (-1, +1)))
        assert sizes[0] > 0.0
        assert sizes[1] / sizes[0] == pytest.approx(2.0, rel=0.05)

    def test_dump_matrix_csv(self, tmp_path):
        dump_matrix_csv(np.eye(3), tmp_path / "out" / "eye.csv")
        rows = (tmp_path / "out" / "eye.csv").read_text().strip().splitlines()
        assert rows[0] == "1,0,0"
        assert len(rows) == 3


class TestEigenstructure:
    """Boundary matrix spectra on contact traces"""

    def test_cluster_eigenvalues(self):
        clusters = cluster_eigenvalues(np.array([-1.0, 0.0, 1e-12, 1.0]), 1.0)
        assert clusters == [(-1.0, 1), (pytest.approx(5e-13), 2), (1.0, 1)]

    def test_background_spectrum(self, background_2d, params_2d):
        js = background_2d.traces()
        report = boundary_matrix_eigencheck(js.minus, js.plus, js.front, params_2d)
        assert report.signature == (4, 4, 8)
        assert report.signature_matches

    def test_constrained_random_traces(self, rng, params):
        js = constrained_jump_state(rng, params)
        report = boundary_matrix_eigencheck(js.minus, js.plus, js.front, params)
        d = params.dim
        assert report.signature == (2 * d, 2 * d, 2 * (d * d - d + 2))
        assert report.to_dict()["signature_matches"] is True

    def test_mass_flux_rejected(self, params_2d):
        moving = ThermoState(1.0, [0.5, 0.0], np.eye(2), 0.0)
        with pytest.raises(MassFluxNonzero):
            boundary_matrix_eigencheck(moving, moving, FrontGeometry.flat(2), params_2d)
