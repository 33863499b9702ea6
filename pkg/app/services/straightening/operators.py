"""Phi-differentials and the straightened operator L(U, Phi)."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from app.models.material import MaterialParams
from app.services.hyperbolic.assembly import (
    LiftDerivatives,
    apply_A0,
    apply_A1tilde,
    apply_Ai,
)
from app.services.straightening.lift import Lift
from app.services.straightening.stencils import Stencils

logger = logging.getLogger(__name__)


@dataclass
class PhiDifferentials:
    """d_t^Phi u and d_i^Phi u (i = 1..d) of one field.

    Attributes:
        dt: d_t^Phi u, or None when no time derivative was supplied
        d: [d_1^Phi u, ..., d_d^Phi u]
    """
    dt: Optional[np.ndarray]
    d: List[np.ndarray]


def phi_differentials_from(
    u: np.ndarray,
    lift: LiftDerivatives,
    stencils: Stencils,
    dt_u: Optional[np.ndarray] = None,
) -> PhiDifferentials:
    """Phi-differentials for precomputed lift derivatives.

    d_t^Phi = d_t - (d_t Phi/d_1 Phi) d_1, d_1^Phi = d_1/d_1 Phi,
    d_i^Phi = d_i - (d_i Phi/d_1 Phi) d_1.

    Raises:
        DegenerateLift: If |d_1 Phi| < 1e-8
    """
    lift.check()
    dim = stencils.grid.dim
    du1 = stencils.d1(u)
    d1 = du1 / lift.d1
    out = [d1]
    for i in range(2, dim + 1):
        out.append(stencils.dtan(u, i) - lift.grad[i - 2] * d1)
    dt = None
    if dt_u is not None:
        dt = dt_u - lift.dt * d1
    return PhiDifferentials(dt, out)


def phi_differentials(u: np.ndarray, lift: Lift, dt_u: Optional[np.ndarray] = None) -> PhiDifferentials:
    """Phi-differentials of a field using the lift's own stencils.

    Example:
        >>> from app.models.grid import Grid
        >>> lift = Lift(Grid(dim=2, n1=16, n_tan=8), +1, 0.0)
        >>> u = lift.Phi[None]
        >>> bool(np.allclose(phi_differentials(u, lift).d[0], 1.0))
        True
    """
    return phi_differentials_from(u, lift.derivatives(), lift.stencils, dt_u)


def apply_L(
    U: np.ndarray,
    lift: Lift,
    params: MaterialParams,
    dt_U: Optional[np.ndarray] = None,
    V: Optional[np.ndarray] = None,
    dt_V: Optional[np.ndarray] = None,
) -> np.ndarray:
    """L(U, Phi) V = A0 d_t V + A~_1 d_1 V + sum_{i>=2} A_i d_i V.

    With V omitted the operator is applied to U itself (the nonlinear residual).

    Args:
        U: Coefficient state field (n, *grid)
        lift: Lift of the side the field lives on
        params: Material parameters
        dt_U: Time derivative of U (zero when omitted)
        V: Field the operator acts on (defaults to U)
        dt_V: Time derivative of V (defaults to dt_U when V is U)

    Returns:
        Residual field (n, *grid)
    """
    if V is None:
        V, dt_V = U, dt_U
    st = lift.stencils
    ld = lift.derivatives()
    out = apply_A1tilde(U, st.d1(V), ld, params)
    if dt_V is not None:
        out = out + apply_A0(U, dt_V, params)
    for i in range(2, params.dim + 1):
        out = out + apply_Ai(U, st.dtan(V, i), params, i - 1)
    return out
