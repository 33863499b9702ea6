"""Basic states: small stationary perturbations of a contact background.

The front is phi(x') = A cos(2 pi k (x_2 + ... + x_d)) with |A| <= 1/2. The
deformation gradient is tilted with the front,

    F_1j = chi(x_1) d_j phi F_jj,   F_j1 = -chi(x_1) F_11 d_j phi   (j >= 2)

and the velocity and pressure carry bumps A_v x_1 exp(-x_1^2) cos(2 pi k.x')
that vanish on x_1 = 0. The entropy is recovered from (rho, p) so the density
relation holds everywhere, and the boundary constraints hold by construction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from app.core.errors import ConfigurationError, ConstraintViolated, DegenerateLift
from app.models.grid import Grid
from app.models.layout import UnknownLayout
from app.models.material import MaterialParams
from app.models.thermo_state import density_from_F
from app.services.hyperbolic.calA import rho_F1N
from app.services.interface.background import BackgroundState
from app.services.interface.jump import boundary_operator_field, varrho_eval
from app.services.straightening.involutions import boundary_residuals
from app.services.straightening.lift import ChiProfile, Lift
from app.services.straightening.operators import PhiDifferentials, phi_differentials
from app.services.straightening.stencils import Stencils, TangentialScheme

logger = logging.getLogger(__name__)

CONSTRAINT_TOL = 1e-10
MAX_FRONT_AMPLITUDE = 0.5


def _sides():
    return (-1, +1)


@dataclass
class BasicState:
    """Fields U+- and front phi on the grid, with derivatives cached.

    Both sides live on x_1 in [0, x_max]; the minus side uses the lift
    Phi- = -x_1 + chi(x_1) phi. The basic state is stationary, so every
    time derivative of it vanishes.

    Attributes:
        params: Material parameters
        grid: Grid
        background: Background the state perturbs
        phi: Front function on the boundary torus
        U_minus: Field U- (n, *grid)
        U_plus: Field U+ (n, *grid)
        lift_minus: Lift Phi-
        lift_plus: Lift Phi+
        norm_order: Order m of the discrete H^m norm defining K
    """
    params: MaterialParams
    grid: Grid
    background: BackgroundState
    phi: np.ndarray
    U_minus: np.ndarray
    U_plus: np.ndarray
    lift_minus: Lift
    lift_plus: Lift
    norm_order: int = 3
    _cache: Dict = field(default_factory=dict, init=False, repr=False)

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def layout(self) -> UnknownLayout:
        return UnknownLayout(self.dim)

    @property
    def stencils(self) -> Stencils:
        return self.lift_plus.stencils

    def field(self, sign: int) -> np.ndarray:
        return self.U_plus if sign > 0 else self.U_minus

    def lift(self, sign: int) -> Lift:
        return self.lift_plus if sign > 0 else self.lift_minus

    def _cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def background_field(self, sign: int) -> np.ndarray:
        vec = self.background.vector(sign)
        return np.broadcast_to(vec.reshape((-1,) + (1,) * self.dim), self.U_plus.shape)

    def perturbation(self, sign: int) -> np.ndarray:
        """V = U - U_bar on one side."""
        return self.field(sign) - self.background_field(sign)

    def derivatives(self, sign: int) -> PhiDifferentials:
        """d_t^Phi U (zero) and d_i^Phi U, i = 1..d."""
        def build():
            U = self.field(sign)
            return phi_differentials(U, self.lift(sign), np.zeros_like(U))
        return self._cached(("derivatives", sign), build)

    def normal_coefficient(self, sign: int) -> np.ndarray:
        """d_1 U / d_1 Phi, the coefficient of the good unknown."""
        return self.derivatives(sign).d[0]

    def rho_F1N(self, sign: int) -> np.ndarray:
        """rho F_1N with N built from the lift, full grid."""
        return self._cached(
            ("r", sign),
            lambda: rho_F1N(self.field(sign), self.lift(sign).derivatives(), self.params),
        )

    def sound_speed_sq(self, sign: int) -> np.ndarray:
        def build():
            _, _, F, S = self.layout.split(self.field(sign))
            rho = density_from_F(np.moveaxis(F, (0, 1), (-2, -1)))
            return self.params.eos().sound_speed_sq(rho, S)
        return self._cached(("c2", sign), build)

    def density(self, sign: int) -> np.ndarray:
        def build():
            _, _, F, _ = self.layout.split(self.field(sign))
            return density_from_F(np.moveaxis(F, (0, 1), (-2, -1)))
        return self._cached(("rho", sign), build)

    # Boundary quantities

    def trace(self, sign: int) -> np.ndarray:
        return self._cached(("trace", sign), lambda: self.stencils.trace(self.field(sign)))

    @property
    def grad_phi(self) -> np.ndarray:
        """(d_2 phi, ..., d_d phi) on the boundary torus."""
        return self._cached("grad_phi", lambda: np.stack(self.stencils.boundary_grad(self.phi)))

    @property
    def normal(self) -> np.ndarray:
        """N = (1, -d_2 phi, ..., -d_d phi) on the boundary."""
        N = np.empty((self.dim,) + self.grid.boundary_shape)
        N[0] = 1.0
        N[1:] = -self.grad_phi
        return N

    def F_trace(self, sign: int) -> np.ndarray:
        """F on the boundary as (*boundary_shape, d, d)."""
        _, _, F, _ = self.layout.split(self.trace(sign))
        return np.moveaxis(F, (0, 1), (-2, -1))

    @property
    def varrho(self) -> Tuple[np.ndarray, np.ndarray]:
        """varrho(F+) and its F-gradient (*boundary_shape, d, d) on the boundary."""
        return self._cached("varrho", lambda: varrho_eval(self.F_trace(+1)))

    @property
    def jump_F11(self) -> np.ndarray:
        lay = self.layout
        f11 = lay.F(0, 0)
        return self.trace(+1)[f11] - self.trace(-1)[f11]

    @property
    def v_tan_plus(self) -> np.ndarray:
        """(v_2+, ..., v_d+) on the boundary."""
        return self.trace(+1)[2:1 + self.dim]

    def partial0(self, u: np.ndarray, dt_u: Optional[np.ndarray] = None) -> np.ndarray:
        """d_0 u = d_t u + sum_{i>=2} v_i+ d_i u for a boundary array (or stack)."""
        out = np.zeros_like(u) if dt_u is None else np.array(dt_u, dtype=float)
        for i in range(2, self.dim + 1):
            out = out + self.v_tan_plus[i - 2] * self.stencils.dtan(u, i)
        return out

    def w_ring(self, sign: int) -> np.ndarray:
        """Transport coefficients w_1 = (v_N - d_t Phi)/d_1 Phi, w_i = v_i on the grid."""
        lay = self.layout
        U = self.field(sign)
        ld = self.lift(sign).derivatives()
        v = U[lay.v_slice]
        v_N = v[0] - sum(ld.grad[j - 1] * v[j] for j in range(1, self.dim))
        out = np.array(v, dtype=float)
        out[0] = (v_N - ld.dt) / ld.d1
        return out

    # Size and checks

    @property
    def is_background(self) -> bool:
        return bool(np.all(self.phi == 0.0)) and all(
            np.all(self.perturbation(s) == 0.0) for s in _sides()
        )

    @property
    def K(self) -> float:
        """Discrete H^m norm of (V+-, phi) with m = ``norm_order``."""
        from app.services.solver.norms import sobolev_norm

        def build():
            total = sum(sobolev_norm(self.perturbation(s), self.stencils, self.norm_order) ** 2
                        for s in _sides())
            total += sobolev_norm(self.phi[None], self.stencils, self.norm_order,
                                  boundary=True) ** 2
            return float(np.sqrt(total))
        return self._cached("K", build)

    def constraint_residuals(self) -> Dict[str, float]:
        """Max-norms of the basic-state constraints."""
        lay = self.layout
        out = {}
        rho_rel = 0.0
        for s in _sides():
            p, _, _, S = lay.split(self.field(s))
            rho_eos = self.params.eos().density_from_pressure(p, S)
            rho_rel = max(rho_rel, float(np.max(np.abs(rho_eos - self.density(s)))))
        out["rho_relation"] = rho_rel
        B = boundary_operator_field(self.trace(-1), self.trace(+1), self.grad_phi,
                                    np.zeros(self.grid.boundary_shape), self.params)
        out["boundary_operator"] = float(np.max(np.abs(B)))
        inv3, inv4, inv5, _ = boundary_residuals(self.trace(-1), self.trace(+1),
                                                 self.grad_phi, self.params)
        out["rho_FN_jump"] = float(np.max(np.abs(inv3)))
        out["involution_jump"] = float(np.max(np.abs(inv4))) if inv4.size else 0.0
        out["F_jN"] = float(np.max(np.abs(inv5))) if inv5.size else 0.0
        cols = [float(np.max(np.abs(self.F_trace(+1)[..., :, j] - self.F_trace(-1)[..., :, j])))
                for j in range(1, self.dim)]
        out["tangential_columns_jump"] = max(cols) if cols else 0.0
        out["transport"] = self._transport_residual()
        return out

    def _transport_residual(self) -> float:
        # (sum_{l>=2} v_l d_l) F_j - sum_{l>=2} F_lj d_l v on the boundary, j >= 2
        lay = self.layout
        worst = 0.0
        for s in _sides():
            tr = self.trace(s)
            _, v, F, _ = lay.split(tr)
            for j in range(1, self.dim):
                for i in range(self.dim):
                    term = sum(v[l] * self.stencils.dtan(F[i, j], l + 1) for l in range(1, self.dim))
                    term = term - sum(F[l, j] * self.stencils.dtan(v[i], l + 1)
                                      for l in range(1, self.dim))
                    worst = max(worst, float(np.max(np.abs(term))))
        return worst

    def check_constraints(self, tol: float = CONSTRAINT_TOL) -> Dict[str, float]:
        """Raise unless every constraint holds to ``tol``.

        Raises:
            ConstraintViolated: Naming the worst constraint
        """
        residuals = self.constraint_residuals()
        name, worst = max(residuals.items(), key=lambda kv: kv[1])
        if worst > tol:
            raise ConstraintViolated(f"basic state violates {name}: residual {worst:.3e} > {tol}")
        for s in _sides():
            margin = float(np.min(s * self.lift(s).derivatives().d1))
            if margin < 0.5:
                raise DegenerateLift(f"+-d1 Phi = {margin:.4f} below 1/2 on side {s:+d}")
        return residuals


def front_profile(grid: Grid, amplitude: float, wavenumber: int) -> np.ndarray:
    """A cos(2 pi k (x_2 + ... + x_d)) on the boundary torus."""
    coords = grid.boundary_coordinates()
    return amplitude * np.cos(2.0 * np.pi * wavenumber * sum(coords))


def interior_bump(grid: Grid, wavenumber: int) -> np.ndarray:
    """x_1 exp(-x_1^2) cos(2 pi k.x'), zero on x_1 = 0."""
    coords = grid.coordinates()
    x1 = coords[0]
    tangential = sum(coords[1:])
    return x1 * np.exp(-x1 * x1) * np.cos(2.0 * np.pi * wavenumber * tangential)


def build_basic_state(
    background: BackgroundState,
    grid: Grid,
    front_amplitude: float = 0.0,
    wavenumber: int = 1,
    velocity_amplitude: float = 0.0,
    pressure_amplitude: float = 0.0,
    profile: ChiProfile = ChiProfile.STANDARD,
    tangential: TangentialScheme = TangentialScheme.CENTRAL,
    norm_order: int = 3,
    tol: float = CONSTRAINT_TOL,
) -> BasicState:
    """Perturb a background into a basic state satisfying all constraints.

    Args:
        background: Piecewise-constant contact background
        grid: Grid (its dimension must match the background)
        front_amplitude: A with |A| <= 1/2
        wavenumber: Tangential wavenumber k of front and bumps
        velocity_amplitude: Amplitude of the velocity bump (every component)
        pressure_amplitude: Amplitude of the pressure bump
        profile: Cutoff profile of the lift
        tangential: Tangential derivative scheme
        norm_order: m of the H^m norm defining K
        tol: Tolerance of the construction-time constraint check

    Returns:
        BasicState with checked constraints

    Raises:
        ConfigurationError: If the grid dimension differs from the background
        DegenerateLift: If |A| > 1/2
        ConstraintViolated: If a constraint fails (only through round-off)

    Example:
        >>> from app.models.material import MaterialParams
        >>> from app.services.interface.background import build_background
        >>> params = MaterialParams(dim=2)
        >>> bg = build_background([1.0, 1.0], 0.5, 0.0, params)
        >>> basic = build_basic_state(bg, Grid(dim=2, n1=16, n_tan=8))
        >>> basic.is_background
        True
    """
    params = background.params
    if grid.dim != params.dim:
        raise ConfigurationError(f"grid dim {grid.dim} differs from material dim {params.dim}")
    if abs(front_amplitude) > MAX_FRONT_AMPLITUDE:
        raise DegenerateLift(f"front amplitude {front_amplitude} exceeds {MAX_FRONT_AMPLITUDE}")
    d = params.dim
    layout = UnknownLayout(d)
    stencils = Stencils(grid, tangential)
    phi = front_profile(grid, front_amplitude, wavenumber)
    lifts = tuple(Lift(grid, s, phi, None, profile, stencils) for s in _sides())
    chi_x1 = lifts[0].Psi_profile
    grad_phi = stencils.boundary_grad(phi)
    bump = interior_bump(grid, wavenumber)

    fields = []
    for s in _sides():
        if front_amplitude == 0.0 and velocity_amplitude == 0.0 and pressure_amplitude == 0.0:
            vec = background.vector(s).reshape((-1,) + (1,) * d)
            fields.append(np.broadcast_to(vec, (layout.n,) + grid.shape).copy())
            continue
        F_bar = background.F(s)
        F = np.broadcast_to(F_bar.reshape((d, d) + (1,) * d), (d, d) + grid.shape).copy()
        for j in range(1, d):
            tilt = chi_x1 * grad_phi[j - 1][None]
            F[0, j] = tilt * F_bar[j, j]
            F[j, 0] = -tilt * F_bar[0, 0]
        rho = density_from_F(np.moveaxis(F, (0, 1), (-2, -1)))
        p = background.pressure(s) + pressure_amplitude * bump
        v = np.stack([velocity_amplitude * bump] * d)
        S = params.eos().entropy_from_pressure(rho, p)
        fields.append(layout.assemble(p, v, F, S))

    basic = BasicState(params, grid, background, phi, fields[0], fields[1],
                       lifts[0], lifts[1], norm_order)
    residuals = basic.check_constraints(tol)
    logger.info(
        f"Basic state built: A={front_amplitude}, k={wavenumber}, "
        f"max constraint residual {max(residuals.values()):.2e}"
    )
    return basic
