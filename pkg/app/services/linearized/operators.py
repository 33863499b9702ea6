"""Linearized interior and boundary operators around a basic state.

Interior: L'(V, Psi) = L V + C V - (1/d_1 Phi)(d_t Psi A0 + d_1 Psi A~_1
+ sum_{i>=2} d_i Psi A_i) d_1 U, and the effective operator L'_e = L + C acting
on the good unknown V' = V - (Psi/d_1 Phi) d_1 U.

Boundary rows of B'(V, psi), with + traces on the plus side, g_j = d_j phi:

    d_t psi - V_v+ . N + sum_j v_j+ d_j psi
    [V_v]
    [V_p] - varrho(F+) [V_F11] - [F_11] dvarrho(F+) : V_F+
    [V_F11] g_j + [F_11] d_j psi + [V_Fj1]                     (j = 2..d)

and B'_e(V', psi) = B'(V', psi) + b psi with b = B'_V(d_1 U / d_1 Phi).
"""

from __future__ import annotations

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from app.models.layout import UnknownLayout
from app.services.hyperbolic.assembly import apply_A0, apply_A1tilde, apply_Ai, zeroth_order_apply
from app.services.interface.jump import boundary_operator_field
from app.services.linearized.basic_state import BasicState
from app.services.straightening.operators import apply_L

logger = logging.getLogger(__name__)

Pair = Tuple[np.ndarray, np.ndarray]


def _index(sign: int) -> int:
    return 1 if sign > 0 else 0


def front_lift(psi: np.ndarray, basic: BasicState) -> np.ndarray:
    """Psi = chi(x_1) psi(x'), the same on both sides."""
    return basic.lift_plus.Psi_profile * np.asarray(psi, dtype=float)[None, ...]


def good_unknowns(V: Pair, psi: np.ndarray, basic: BasicState) -> Pair:
    """V' = V - (Psi/d_1 Phi) d_1 U on both sides.

    Args:
        V: (V-, V+) perturbation fields
        psi: Front perturbation on the boundary torus
        basic: Basic state

    Returns:
        (V'-, V'+)

    Raises:
        DegenerateLift: If d_1 Phi degenerates
    """
    Psi = front_lift(psi, basic)
    return tuple(V[_index(s)] - Psi[None] * basic.normal_coefficient(s) for s in (-1, +1))


def from_good_unknowns(Vdot: Pair, psi: np.ndarray, basic: BasicState) -> Pair:
    """Inverse of :func:`good_unknowns`."""
    Psi = front_lift(psi, basic)
    return tuple(Vdot[_index(s)] + Psi[None] * basic.normal_coefficient(s) for s in (-1, +1))


def zeroth_order(Vdot: np.ndarray, basic: BasicState, sign: int) -> np.ndarray:
    """C(U, Phi) V' on one side."""
    diffs = basic.derivatives(sign)
    return zeroth_order_apply(basic.field(sign), diffs.dt, diffs.d, Vdot, basic.params)


def apply_Lprime_e(
    Vdot: np.ndarray,
    basic: BasicState,
    sign: int,
    dt_V: Optional[np.ndarray] = None,
) -> np.ndarray:
    """L(U, Phi) V' + C(U, Phi) V' on one side.

    Args:
        Vdot: Good unknown field (n, *grid)
        basic: Basic state
        sign: Side, +1 or -1
        dt_V: Time derivative of V' (the A0 term is dropped when omitted)

    Returns:
        Field (n, *grid)
    """
    U = basic.field(sign)
    out = apply_L(U, basic.lift(sign), basic.params, V=Vdot, dt_V=dt_V)
    return out + zeroth_order(Vdot, basic, sign)


def apply_Lprime(
    V: np.ndarray,
    psi: np.ndarray,
    basic: BasicState,
    sign: int,
    dt_V: Optional[np.ndarray] = None,
    dt_psi: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Full linearization L'(U, Phi)(V, Psi) on one side, Psi = chi psi."""
    params = basic.params
    U = basic.field(sign)
    st = basic.stencils
    ld = basic.lift(sign).derivatives()
    Psi = front_lift(psi, basic)
    d1U = st.d1(U)

    coupling = apply_A1tilde(U, d1U, ld, params) * st.d1(Psi)
    if dt_psi is not None:
        coupling = coupling + apply_A0(U, d1U, params) * front_lift(dt_psi, basic)
    for i in range(2, params.dim + 1):
        coupling = coupling + apply_Ai(U, d1U, params, i - 1) * st.dtan(Psi, i)
    return apply_Lprime_e(V, basic, sign, dt_V) - coupling / ld.d1


def alinhac_residual(
    V: np.ndarray,
    psi: np.ndarray,
    basic: BasicState,
    sign: int,
    dt_V: Optional[np.ndarray] = None,
    dt_psi: Optional[np.ndarray] = None,
) -> np.ndarray:
    """L'(V, Psi) - [L V' + C V' + (Psi/d_1 Phi) d_1 (L(U, Phi) U)].

    Vanishes in the continuum; the discrete field is stencil truncation.
    """
    st = basic.stencils
    U = basic.field(sign)
    ld = basic.lift(sign).derivatives()
    Psi = front_lift(psi, basic)
    coef = basic.normal_coefficient(sign)
    Vdot = V - Psi[None] * coef
    if dt_psi is not None and dt_V is None:
        dt_V = np.zeros_like(V)
    dt_Vdot = None
    if dt_V is not None:
        dt_Vdot = dt_V - (front_lift(dt_psi, basic)[None] * coef if dt_psi is not None else 0.0)
    LU = apply_L(U, basic.lift(sign), basic.params, dt_U=np.zeros_like(U))
    rhs = apply_Lprime_e(Vdot, basic, sign, dt_Vdot) + (Psi / ld.d1)[None] * st.d1(LU)
    return apply_Lprime(V, psi, basic, sign, dt_V, dt_psi) - rhs


# ---------------------------------------------------------------------------
# Boundary operators
# ---------------------------------------------------------------------------

def apply_Bprime(
    V_minus: np.ndarray,
    V_plus: np.ndarray,
    psi: np.ndarray,
    basic: BasicState,
    dt_psi: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Linearized varrho-form boundary operator on traces, (2d+1, *boundary_shape).

    Args:
        V_minus: Trace of V- on x_1 = 0, (n, *boundary_shape)
        V_plus: Trace of V+
        psi: Front perturbation
        basic: Basic state
        dt_psi: d_t psi (zero when omitted)
    """
    lay = basic.layout
    d = basic.dim
    st = basic.stencils
    psi = np.asarray(psi, dtype=float)
    g = basic.grad_phi
    v_tan = basic.v_tan_plus
    value, grad = basic.varrho
    dpsi = st.boundary_grad(psi) if d > 1 else []
    jump = V_plus - V_minus
    jump_F11 = basic.jump_F11

    out = np.zeros((2 * d + 1,) + basic.grid.boundary_shape)
    vN = V_plus[lay.v(0)] - sum(g[j - 1] * V_plus[lay.v(j)] for j in range(1, d))
    out[0] = -vN + sum(v_tan[j - 1] * dpsi[j - 1] for j in range(1, d))
    if dt_psi is not None:
        out[0] = out[0] + dt_psi
    out[1:d + 1] = jump[lay.v_slice]
    _, _, VF, _ = lay.split(V_plus)
    dvarrho = np.einsum("...ij,ij...->...", grad, VF)
    out[d + 1] = jump[lay.p] - value * jump[lay.F(0, 0)] - jump_F11 * dvarrho
    for j in range(1, d):
        out[d + 1 + j] = (jump[lay.F(0, 0)] * g[j - 1] + jump_F11 * dpsi[j - 1]
                          + jump[lay.F(j, 0)])
    return out


def b_coefficients(basic: BasicState) -> np.ndarray:
    """b = B'_V(d_1 U+-/d_1 Phi+-) on the boundary, (2d+1, *boundary_shape)."""
    def build():
        st = basic.stencils
        coef = [st.trace(basic.normal_coefficient(s)) for s in (-1, +1)]
        return apply_Bprime(coef[0], coef[1], np.zeros(basic.grid.boundary_shape), basic)
    return basic._cached("b_coefficients", build)


def apply_Bprime_e(
    Vdot_minus: np.ndarray,
    Vdot_plus: np.ndarray,
    psi: np.ndarray,
    basic: BasicState,
    dt_psi: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Effective boundary operator B'_e(V', psi) = B'(V', psi) + b psi."""
    out = apply_Bprime(Vdot_minus, Vdot_plus, psi, basic, dt_psi)
    return out + b_coefficients(basic) * np.asarray(psi)[None]


def nonlinear_boundary(
    basic: BasicState,
    V_minus: Optional[np.ndarray] = None,
    V_plus: Optional[np.ndarray] = None,
    psi: Optional[np.ndarray] = None,
    dt_psi: Optional[np.ndarray] = None,
    eps: float = 0.0,
) -> np.ndarray:
    """B(U + eps V, phi + eps psi) on the boundary for trace perturbations."""
    bshape = basic.grid.boundary_shape
    U_m = basic.trace(-1) + (eps * V_minus if V_minus is not None else 0.0)
    U_p = basic.trace(+1) + (eps * V_plus if V_plus is not None else 0.0)
    phi = basic.phi + (eps * psi if psi is not None else 0.0)
    dt_phi = eps * dt_psi if dt_psi is not None else np.zeros(bshape)
    grad_phi = np.stack(basic.stencils.boundary_grad(phi))
    return boundary_operator_field(U_m, U_p, grad_phi, dt_phi, basic.params)


def linearization_errors(
    basic: BasicState,
    V_minus: np.ndarray,
    V_plus: np.ndarray,
    psi: np.ndarray,
    dt_psi: Optional[np.ndarray] = None,
    eps_values: Sequence[float] = (1e-2, 1e-3, 1e-4, 1e-5),
) -> Dict[str, object]:
    """Max-norm of (B(U + eps V, phi + eps psi) - B(U, phi))/eps - B'(V, psi).

    Returns:
        Dict with the eps values, the errors and the least-squares log-log slope
    """
    base = nonlinear_boundary(basic)
    lin = apply_Bprime(V_minus, V_plus, psi, basic, dt_psi)
    errors = []
    for eps in eps_values:
        moved = nonlinear_boundary(basic, V_minus, V_plus, psi, dt_psi, eps)
        errors.append(float(np.max(np.abs((moved - base) / eps - lin))))
    errors_arr = np.asarray(errors)
    positive = errors_arr > 0.0
    slope = float("nan")
    if positive.sum() >= 2:
        slope = float(np.polyfit(np.log(np.asarray(eps_values)[positive]),
                                 np.log(errors_arr[positive]), 1)[0])
    logger.debug(f"Boundary linearization errors {errors}, slope {slope:.3f}")
    return {"eps": list(eps_values), "errors": errors, "slope": slope}
