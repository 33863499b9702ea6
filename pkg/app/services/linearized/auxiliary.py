"""Linearized divergences, compatibility quantities and front-gradient identities.

For V' = J W on each side (d_i = d_i^Phi of the basic lift):

    varsigma = d_i (c^{-2} F_i1 p + rho F_i1)          basic F, c, rho; perturbation p, F
    eta_i    = F_k1 d_k F_i2 - F_k2 d_k F_i1
    zeta_i   = F_k1 d_k F_i3 - F_k3 d_k F_i1           (d = 3)
    R_j      = F_j+ . N - sum_{i>=2} F_ij+ d_i psi     (boundary, j = 2..d)

The reconstruction identities recover the normal derivatives of the
characteristic unknowns from these quantities; their residuals are returned
alongside.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from app.services.linearized.basic_state import BasicState
from app.services.linearized.wvars import from_W
from app.services.straightening.operators import phi_differentials

logger = logging.getLogger(__name__)

Pair = Tuple[np.ndarray, np.ndarray]


@dataclass
class AuxiliaryQuantities:
    """Auxiliary fields on both sides and the boundary fields R_j.

    Attributes:
        varsigma: (minus, plus) fields
        eta: (minus, plus), each (d, *grid)
        zeta: (minus, plus) for d = 3, otherwise None
        R: (d-1, *boundary_shape)
        identities: Max-norm of each reconstruction-identity residual
    """
    varsigma: Pair
    eta: Pair
    zeta: Optional[Pair]
    R: np.ndarray
    identities: Dict[str, float] = field(default_factory=dict)

    def norms(self, weights: np.ndarray) -> Dict[str, float]:
        """Quadrature L2 norms summed over both sides."""
        def l2(pair):
            if pair is None:
                return 0.0
            total = 0.0
            for values in pair:
                values = values if values.ndim > weights.ndim else values[None]
                total += float(np.sum(weights * np.sum(values * values, axis=0)))
            return float(np.sqrt(total))
        return {"aux_varsigma": l2(self.varsigma), "aux_eta": l2(self.eta), "aux_zeta": l2(self.zeta)}


def _F_split(V: np.ndarray, basic: BasicState):
    _, _, F, _ = basic.layout.split(V)
    return F


def varsigma_field(Vdot: np.ndarray, basic: BasicState, sign: int) -> np.ndarray:
    lay = basic.layout
    d = basic.dim
    F0 = _F_split(basic.field(sign), basic)
    F = _F_split(Vdot, basic)
    c2 = basic.sound_speed_sq(sign)
    rho = basic.density(sign)
    q = np.stack([F0[i, 0] * Vdot[lay.p] / c2 + rho * F[i, 0] for i in range(d)])
    dq = phi_differentials(q, basic.lift(sign)).d
    return sum(dq[i][i] for i in range(d))


def compatibility_field(Vdot: np.ndarray, basic: BasicState, sign: int, column: int) -> np.ndarray:
    """eta (column = 1) or zeta (column = 2), 0-based column index."""
    d = basic.dim
    F0 = _F_split(basic.field(sign), basic)
    F = _F_split(Vdot, basic)
    lift = basic.lift(sign)
    dc = phi_differentials(F[:, column], lift).d
    d1 = phi_differentials(F[:, 0], lift).d
    return np.stack([
        sum(F0[k, 0] * dc[k][i] - F0[k, column] * d1[k][i] for k in range(d))
        for i in range(d)
    ])


def R_fields(Vdot_plus_trace: np.ndarray, psi: np.ndarray, basic: BasicState) -> np.ndarray:
    """R_j for j = 2..d on the boundary."""
    d = basic.dim
    F = _F_split(Vdot_plus_trace, basic)
    F0 = np.moveaxis(basic.F_trace(+1), (-2, -1), (0, 1))
    N = basic.normal
    dpsi = basic.stencils.boundary_grad(psi)
    out = []
    for j in range(1, d):
        FN = sum(F[l, j] * N[l] for l in range(d))
        out.append(FN - sum(F0[i, j] * dpsi[i - 1] for i in range(1, d)))
    return np.stack(out)


def varsigma_identity_residual(W: np.ndarray, varsigma: np.ndarray, basic: BasicState, sign: int) -> np.ndarray:
    """d_1 p recovered from varsigma and noncharacteristic W, minus the stencil d_1 p.

    With kappa = (c^{-2} F_1N^2 + |N|^2)/F_1N the identity reads
    kappa d_1 p = d_1Phi varsigma - (d_1 kappa) p + d_1(rho |N|^2/r W_{d+1})
    + d_1(rho sum_j g_j W_{d+j}) - sum_{i>=2} d_i(d_1Phi (c^{-2} F_i1 p + rho F_i1)).
    """
    lay = basic.layout
    d = basic.dim
    st = basic.stencils
    U = basic.field(sign)
    F0 = _F_split(U, basic)
    ld = basic.lift(sign).derivatives()
    g = ld.grad
    c2 = basic.sound_speed_sq(sign)
    rho = basic.density(sign)
    r = basic.rho_F1N(sign)
    N2 = 1.0 + sum(g[j] ** 2 for j in range(d - 1))
    F1N = F0[0, 0] - sum(g[j - 1] * F0[j, 0] for j in range(1, d))
    kappa = (F1N ** 2 / c2 + N2) / F1N

    p = W[lay.p]
    Vdot = from_W(W, basic, sign)
    F = _F_split(Vdot, basic)
    rhs = ld.d1 * varsigma - st.d1(kappa) * p
    rhs = rhs + st.d1(rho * N2 / r * W[lay.F(0, 0)])
    rhs = rhs + st.d1(rho * sum(g[j - 1] * W[lay.F(j, 0)] for j in range(1, d)))
    for i in range(1, d):
        q_i = F0[i, 0] * p / c2 + rho * F[i, 0]
        rhs = rhs - st.dtan(ld.d1 * q_i, i + 1)
    return rhs / kappa - st.d1(p)


def compatibility_identity_residual(
    Vdot: np.ndarray,
    quantity: np.ndarray,
    basic: BasicState,
    sign: int,
    column: int,
) -> np.ndarray:
    """d_1 F_i,column recovered from eta/zeta, minus the stencil derivative.

    F_1N d_1 F_ic = d_1Phi q_i + F_cN d_1 F_i1 - d_1Phi sum_{l>=2}(F_l1 d_l F_ic - F_lc d_l F_i1).
    """
    d = basic.dim
    st = basic.stencils
    F0 = _F_split(basic.field(sign), basic)
    F = _F_split(Vdot, basic)
    ld = basic.lift(sign).derivatives()
    g = ld.grad

    def column_N(c):
        return F0[0, c] - sum(g[l - 1] * F0[l, c] for l in range(1, d))

    F1N, FcN = column_N(0), column_N(column)
    out = []
    for i in range(d):
        d1_i1 = st.d1(F[i, 0])
        tangential = sum(F0[l, 0] * st.dtan(F[i, column], l + 1) - F0[l, column] * st.dtan(F[i, 0], l + 1)
                         for l in range(1, d))
        recovered = (ld.d1 * quantity[i] + FcN * d1_i1 - ld.d1 * tangential) / F1N
        out.append(recovered - st.d1(F[i, column]))
    return np.stack(out)


def psi_gradient_residual(R: np.ndarray, Vdot_plus_trace: np.ndarray, psi: np.ndarray,
                          basic: BasicState) -> np.ndarray:
    """grad' psi = (F'^T)^{-1}(F'_N - R) against the stencil gradient.

    F' is the tangential block of the basic F+ on the boundary; the inverse is
    written as varrho(F+) times the adjugate.
    """
    d = basic.dim
    F = _F_split(Vdot_plus_trace, basic)
    N = basic.normal
    minor = basic.F_trace(+1)[..., 1:, 1:]
    varrho, _ = basic.varrho
    if d == 2:
        adj = np.ones(minor.shape)
    else:
        adj = np.empty(minor.shape)
        adj[..., 0, 0] = minor[..., 1, 1]
        adj[..., 1, 1] = minor[..., 0, 0]
        adj[..., 0, 1] = -minor[..., 0, 1]
        adj[..., 1, 0] = -minor[..., 1, 0]
    # (F'^T)^{-1} = varrho adj(F')^T
    inv_T = varrho[..., None, None] * np.swapaxes(adj, -1, -2)
    rhs = np.stack([sum(F[l, j] * N[l] for l in range(d)) for j in range(1, d)]) - R
    recovered = np.einsum("...ij,j...->i...", inv_T, rhs)
    return recovered - np.stack(basic.stencils.boundary_grad(psi))


def auxiliary_eval(W: Pair, psi: np.ndarray, basic: BasicState) -> AuxiliaryQuantities:
    """Auxiliary quantities and reconstruction residuals of a W field pair.

    Args:
        W: (W-, W+) full fields
        psi: Front perturbation
        basic: Basic state

    Returns:
        AuxiliaryQuantities; all fields vanish for (W, psi) = 0
    """
    d = basic.dim
    st = basic.stencils
    Vdot = [from_W(W[0], basic, -1), from_W(W[1], basic, +1)]
    varsigma, eta, zeta = [], [], []
    identities = {"varsigma": 0.0, "eta": 0.0, "zeta": 0.0}
    for k, s in enumerate((-1, +1)):
        vs = varsigma_field(Vdot[k], basic, s)
        varsigma.append(vs)
        res = varsigma_identity_residual(W[k], vs, basic, s)
        identities["varsigma"] = max(identities["varsigma"], float(np.max(np.abs(res))))
        et = compatibility_field(Vdot[k], basic, s, 1)
        eta.append(et)
        res = compatibility_identity_residual(Vdot[k], et, basic, s, 1)
        identities["eta"] = max(identities["eta"], float(np.max(np.abs(res))))
        if d == 3:
            ze = compatibility_field(Vdot[k], basic, s, 2)
            zeta.append(ze)
            res = compatibility_identity_residual(Vdot[k], ze, basic, s, 2)
            identities["zeta"] = max(identities["zeta"], float(np.max(np.abs(res))))
    trace_plus = st.trace(Vdot[1])
    R = R_fields(trace_plus, psi, basic)
    identities["psi_gradient"] = float(np.max(np.abs(psi_gradient_residual(R, trace_plus, psi, basic))))
    return AuxiliaryQuantities(
        varsigma=tuple(varsigma),
        eta=tuple(eta),
        zeta=tuple(zeta) if d == 3 else None,
        R=R,
        identities=identities,
    )
