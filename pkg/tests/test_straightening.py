"""Tests for the straightened formulation.

Tests cover:
- Derivative stencils in x_1 and in the periodic tangential directions
- Cutoff chi, its derivative bound and the lifting functions Phi+-
- Phi-differentials and the straightened operator on constant states
- Involution residuals of backgrounds and perturbed basic states
- Drift bookkeeping and the refinement order of the transport check
"""

import numpy as np
import pytest

from app.core.errors import DegenerateLift
from app.models.grid import Grid
from app.services.linearized.basic_state import build_basic_state
from app.services.straightening import (
    ChiProfile,
    Lift,
    Stencils,
    TangentialScheme,
    apply_L,
    chi,
    chi_prime,
    chi_prime_max,
    involution_residuals,
    involution_transport_check,
    lift_pair,
    phi_differentials,
    rho_relation_residual,
    smooth_step,
)


@pytest.fixture
def grid():
    return Grid(dim=2, n1=16, n_tan=8, x_max=4.0)


class TestStencils:
    """Finite-difference and spectral derivatives"""

    def test_d1_exact_for_quadratics(self, grid):
        st = Stencils(grid)
        x1 = grid.coordinates()[0]
        np.testing.assert_allclose(st.d(x1[None] ** 2, 1)[0], 2.0 * x1, atol=1e-12)

    def test_spectral_tangential_derivative(self, grid):
        st = Stencils(grid, TangentialScheme.SPECTRAL)
        x2 = grid.coordinates()[1]
        u = np.sin(2.0 * np.pi * x2)[None]
        np.testing.assert_allclose(st.d(u, 2)[0], 2.0 * np.pi * np.cos(2.0 * np.pi * x2), atol=1e-12)

    def test_central_tangential_derivative_converges(self):
        fine = Grid(dim=2, n1=8, n_tan=128)
        st = Stencils(fine)
        x2 = fine.coordinates()[1]
        du = st.d(np.sin(2.0 * np.pi * x2)[None], 2)[0]
        np.testing.assert_allclose(du, 2.0 * np.pi * np.cos(2.0 * np.pi * x2), atol=1e-2)

    def test_constant_has_zero_derivatives(self, grid):
        for scheme in TangentialScheme:
            st = Stencils(grid, scheme)
            for du in st.grad(np.full((2,) + grid.shape, 3.0)):
                np.testing.assert_allclose(du, 0.0, atol=1e-12)

    def test_d1_vanishes_exactly_on_constants(self, grid):
        st = Stencils(grid)
        u = np.full((2,) + grid.shape, 1.0 / 3.0)
        np.testing.assert_array_equal(st.d(u, 1), 0.0)
        np.testing.assert_array_equal(st.normal_trace_derivative(u), 0.0)

    def test_trace_and_normal_derivative(self, grid):
        st = Stencils(grid)
        x1 = grid.coordinates()[0]
        u = (1.0 + 2.0 * x1)[None]
        np.testing.assert_allclose(st.trace(u), 1.0)
        np.testing.assert_allclose(st.normal_trace_derivative(u), 2.0, atol=1e-12)

    def test_boundary_gradient_shape(self, grid):
        st = Stencils(grid)
        grads = st.boundary_grad(np.zeros(grid.boundary_shape))
        assert len(grads) == 1
        assert grads[0].shape == grid.boundary_shape


class TestCutoff:
    """Smooth cutoff chi and its profiles"""

    def test_step_limits(self):
        np.testing.assert_allclose(smooth_step([-1.0, 0.0, 1.0, 2.0]), [0.0, 0.0, 1.0, 1.0])

    def test_step_midpoint(self):
        assert float(smooth_step(0.5)) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("profile", list(ChiProfile))
    def test_chi_plateau_and_support(self, profile):
        np.testing.assert_allclose(chi([-1.0, 0.0, 0.5, 1.0], profile), 1.0)
        np.testing.assert_allclose(chi([profile.support, -profile.support - 0.5], profile), 0.0)

    @pytest.mark.parametrize("profile", list(ChiProfile))
    def test_derivative_bound_below_one(self, profile):
        assert chi_prime_max(profile) < 1.0
        r = np.linspace(-5.0, 5.0, 1001)
        assert np.max(np.abs(chi_prime(r, profile))) <= chi_prime_max(profile) + 1e-12

    def test_chi_decreasing_outside_plateau(self):
        r = np.linspace(1.0, 3.0, 50)
        assert np.all(np.diff(chi(r)) <= 1e-15)


class TestLift:
    """Lifting functions and Phi-differentials"""

    def test_flat_lift_is_signed_coordinate(self, grid):
        minus, plus = lift_pair(grid, 0.0)
        x1 = grid.coordinates()[0]
        np.testing.assert_allclose(plus.Phi, x1)
        np.testing.assert_allclose(minus.Phi, -x1)
        np.testing.assert_allclose(minus.derivatives().d1, -1.0, atol=1e-12)

    def test_boundary_value_is_front(self, grid):
        phi = 0.1 * np.cos(2.0 * np.pi * grid.boundary_coordinates()[0])
        lift = Lift(grid, +1, phi)
        np.testing.assert_allclose(lift.Phi[0], phi)
        np.testing.assert_allclose(lift.boundary_derivatives().d1, lift.derivatives().d1[0])

    def test_normal_derivative_stays_away_from_zero(self, grid):
        phi = 0.3 * np.cos(2.0 * np.pi * grid.boundary_coordinates()[0])
        for lift in lift_pair(grid, phi):
            assert np.min(lift.sign * lift.derivatives().d1) > 0.5

    def test_phi_differentials_of_Phi(self, grid):
        lift = Lift(grid, +1, 0.0)
        diffs = phi_differentials(lift.Phi[None], lift)
        np.testing.assert_allclose(diffs.d[0], 1.0)

    def test_apply_L_vanishes_on_constant_state(self, background_2d, grid):
        lift = Lift(grid, +1, 0.1 * np.cos(2.0 * np.pi * grid.boundary_coordinates()[0]))
        U = np.broadcast_to(background_2d.vector(+1).reshape(-1, 1, 1), (8,) + grid.shape).copy()
        np.testing.assert_allclose(apply_L(U, lift, background_2d.params), 0.0, atol=1e-12)

    def test_too_large_front_rejected(self, background_2d, grid):
        with pytest.raises(DegenerateLift):
            build_basic_state(background_2d, grid, front_amplitude=0.6)


class TestInvolutions:
    """Constraint residuals and their drift"""

    def test_background_residuals_vanish(self, flat_basic):
        res = involution_residuals(flat_basic.U_minus, flat_basic.U_plus, flat_basic.lift_minus,
                                   flat_basic.lift_plus, flat_basic.params)
        for name, value in res.max_norms().items():
            assert value <= 1e-12, name

    def test_perturbed_boundary_constraints(self, perturbed_basic):
        res = involution_residuals(perturbed_basic.U_minus, perturbed_basic.U_plus,
                                   perturbed_basic.lift_minus, perturbed_basic.lift_plus,
                                   perturbed_basic.params)
        norms = res.max_norms()
        assert norms["inv3"] <= 1e-10
        assert norms["inv5"] <= 1e-10
        assert norms["key1"] <= 1e-10

    def test_rho_relation_residual(self):
        F = np.array([[[0.5, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 2.0]]])
        np.testing.assert_allclose(rho_relation_residual([2.0, 1.0], F), [0.0, 0.5], atol=1e-15)

    def test_basic_state_constraints_checked(self, perturbed_basic):
        residuals = perturbed_basic.check_constraints()
        assert max(residuals.values()) <= 1e-10
        assert "transport" in residuals

    def test_transport_check_order(self):
        coarse = [(0.0, {"inv1": 0.0}), (1.0, {"inv1": 2.0})]
        fine = [(0.0, {"inv1": 0.0}), (1.0, {"inv1": 0.5})]
        report = involution_transport_check(coarse, fine)
        assert report["final"] == {"inv1": 2.0}
        assert report["order"]["inv1"] == pytest.approx(2.0)
        assert report["times"] == [0.0, 1.0]

    def test_transport_check_without_refinement(self):
        report = involution_transport_check([(0.5, {"rho": 1e-3})])
        assert "order" not in report
        assert report["drift"] == {"rho": [1e-3]}
