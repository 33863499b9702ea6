"""Homogenization of the boundary source.

V_nat = chi(x_1) G(t, x') with G chosen pointwise on the boundary so that
B'_e(V_nat, 0) = g. G lives in 2d+1 selected trace components

    v+ (all d components), v_1-, p+, F_j1+ (j = 2..d)

so every tangential velocity jump is carried by v+ and the normal jump by
v_1-. The interior source is corrected to f~ = f - L V_nat - C V_nat.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from app.core.errors import SingularBoundarySystem
from app.services.linearized.basic_state import BasicState
from app.services.linearized.operators import apply_Bprime, apply_Lprime_e

logger = logging.getLogger(__name__)

SINGULAR_COND = 1e8


def selected_components(basic: BasicState) -> List[Tuple[int, int]]:
    """(side, component) pairs carrying the lifted boundary data."""
    lay = basic.layout
    d = basic.dim
    picks = [(+1, lay.v(a)) for a in range(d)]
    picks.append((-1, lay.v(0)))
    picks.append((+1, lay.p))
    picks += [(+1, lay.F(j, 0)) for j in range(1, d)]
    return picks


def selection_matrix(basic: BasicState) -> np.ndarray:
    """Boundary rows of B'_e(., 0) on the selected components, (*boundary_shape, m, m)."""
    def build():
        n = basic.layout.n
        bshape = basic.grid.boundary_shape
        picks = selected_components(basic)
        m = len(picks)
        M = np.zeros(bshape + (m, m))
        zero_psi = np.zeros(bshape)
        for col, (side, comp) in enumerate(picks):
            e = [np.zeros((n,) + bshape), np.zeros((n,) + bshape)]
            e[0 if side < 0 else 1][comp] = 1.0
            M[..., :, col] = np.moveaxis(apply_Bprime(e[0], e[1], zero_psi, basic), 0, -1)
        cond = np.linalg.cond(M.reshape((-1, m, m)))
        worst = float(np.max(cond))
        if not np.isfinite(worst) or worst > SINGULAR_COND:
            raise SingularBoundarySystem(f"boundary lift system cond {worst:.3e} > {SINGULAR_COND:.0e}")
        return M
    return basic._cached("selection_matrix", build)


def _solve(basic: BasicState, g: np.ndarray) -> np.ndarray:
    M = selection_matrix(basic)
    rhs = np.moveaxis(np.asarray(g, dtype=float), 0, -1)[..., None]
    return np.moveaxis(np.linalg.solve(M, rhs)[..., 0], -1, 0)


def _extend(basic: BasicState, G: np.ndarray):
    n = basic.layout.n
    chi_x1 = basic.lift_plus.Psi_profile
    fields = [np.zeros((n,) + basic.grid.shape), np.zeros((n,) + basic.grid.shape)]
    for value, (side, comp) in zip(G, selected_components(basic)):
        fields[0 if side < 0 else 1][comp] = chi_x1 * value[None, ...]
    return fields


@dataclass
class BoundaryLift:
    """Lifted boundary data and the corrected interior source.

    Attributes:
        minus: V_nat on the minus side
        plus: V_nat on the plus side
        f_minus: f~ on the minus side
        f_plus: f~ on the plus side
        traces: Solved G, (2d+1, *boundary_shape)
    """
    minus: np.ndarray
    plus: np.ndarray
    f_minus: np.ndarray
    f_plus: np.ndarray
    traces: np.ndarray

    def side(self, sign: int) -> np.ndarray:
        return self.plus if sign > 0 else self.minus

    def source(self, sign: int) -> np.ndarray:
        return self.f_plus if sign > 0 else self.f_minus


def lift_boundary_source(
    g: np.ndarray,
    basic: BasicState,
    f: Optional[Tuple[np.ndarray, np.ndarray]] = None,
    dt_g: Optional[np.ndarray] = None,
) -> BoundaryLift:
    """Lift a boundary source into the interior and correct the interior source.

    Args:
        g: Boundary source, (2d+1, *boundary_shape)
        basic: Basic state
        f: Interior sources (f-, f+), zero when omitted
        dt_g: d_t g, used for d_t V_nat in L (zero when omitted)

    Returns:
        BoundaryLift with V_nat and f~ = f - L V_nat - C V_nat

    Raises:
        SingularBoundarySystem: If the selected boundary system has cond > 1e8
    """
    shape = basic.U_plus.shape
    G = _solve(basic, g)
    V = _extend(basic, G)
    dt_V = _extend(basic, _solve(basic, dt_g)) if dt_g is not None else [None, None]
    f = f if f is not None else (np.zeros(shape), np.zeros(shape))
    corrected = []
    for k, s in enumerate((-1, +1)):
        corrected.append(f[k] - apply_Lprime_e(V[k], basic, s, dt_V[k]))
    logger.debug(f"Boundary source lifted: max |G| = {float(np.max(np.abs(G))) if G.size else 0.0:.3e}")
    return BoundaryLift(V[0], V[1], corrected[0], corrected[1], G)
