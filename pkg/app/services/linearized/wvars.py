"""W-variables of the effective problem and the boundary conditions in W-form.

With r = rho F_1N, g_j = d_j Phi and 0-based storage indices

    W_0 = p,  W_1 = v . N,  W_{d+1} = p - r F_11,  W_{d+j} = g_j F_11 + F_j1

and everything else copied from V'. The boundary conditions on x_1 = 0 read
(b from the effective boundary operator, s the boundary source)

    d_0 psi - W_1+ + b_0 psi = s_0
    [W_1] + (b_1 - sum_j g_j b_j) psi = s_1 - sum_j g_j s_j
    [W_a] + b_a psi = s_a                                    (a = 2..d)
    [W_{d+1}] - [F_11] dvarrho(F+) : F+ + b_{d+1} psi = s_{d+1}
    [W_{d+j}] + [F_11] d_j psi + b_{d+j} psi = s_{d+j}       (j = 2..d)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from app.core.errors import DegenerateF1N
from app.services.hyperbolic.calA import DEGENERATE_F1N_TOL, CoefficientMatrices, assemble_J_and_calA
from app.services.linearized.basic_state import BasicState
from app.services.linearized.operators import b_coefficients

logger = logging.getLogger(__name__)


class Representation(Enum):
    """Which unknowns a LinearField currently holds."""
    GOOD = "good"
    W = "W"


def _coefficients(basic: BasicState, sign: int, on_boundary: bool):
    r = basic.rho_F1N(sign)
    grad = basic.lift(sign).derivatives().grad
    if on_boundary:
        r = basic.stencils.trace(r)
        grad = grad[:, 0]
    if np.any(np.abs(r) < DEGENERATE_F1N_TOL):
        raise DegenerateF1N(f"|rho F_1N| < {DEGENERATE_F1N_TOL}: min {np.min(np.abs(r))}")
    return r, grad


def _on_boundary(V: np.ndarray, basic: BasicState) -> bool:
    return V.ndim == basic.dim


def to_W(Vdot: np.ndarray, basic: BasicState, sign: int) -> np.ndarray:
    """W = J^{-1} V' for a full field or a boundary trace.

    Raises:
        DegenerateF1N: If |rho F_1N| < 1e-10
    """
    lay = basic.layout
    d = basic.dim
    r, g = _coefficients(basic, sign, _on_boundary(Vdot, basic))
    W = np.array(Vdot, dtype=float)
    f11 = lay.F(0, 0)
    W[lay.v(0)] = Vdot[lay.v(0)] - sum(g[j - 1] * Vdot[lay.v(j)] for j in range(1, d))
    W[f11] = Vdot[lay.p] - r * Vdot[f11]
    for j in range(1, d):
        W[lay.F(j, 0)] = g[j - 1] * Vdot[f11] + Vdot[lay.F(j, 0)]
    return W


def from_W(W: np.ndarray, basic: BasicState, sign: int) -> np.ndarray:
    """V' = J W for a full field or a boundary trace."""
    lay = basic.layout
    d = basic.dim
    r, g = _coefficients(basic, sign, _on_boundary(W, basic))
    V = np.array(W, dtype=float)
    f11 = lay.F(0, 0)
    V[lay.v(0)] = W[lay.v(0)] + sum(g[j - 1] * W[lay.v(j)] for j in range(1, d))
    F11 = (W[lay.p] - W[f11]) / r
    V[f11] = F11
    for j in range(1, d):
        V[lay.F(j, 0)] = W[lay.F(j, 0)] - g[j - 1] * F11
    return V


@dataclass
class LinearField:
    """Perturbation on both sides plus the front perturbation.

    Attributes:
        minus: Field on the minus side (n, *grid)
        plus: Field on the plus side
        psi: Front perturbation on the boundary torus
        t: Time of the fields
        representation: Whether the fields hold V' or W
    """
    minus: np.ndarray
    plus: np.ndarray
    psi: np.ndarray
    t: float = 0.0
    representation: Representation = Representation.GOOD

    @classmethod
    def zeros(cls, basic: BasicState, representation: Representation = Representation.GOOD) -> "LinearField":
        shape = basic.U_plus.shape
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(basic.grid.boundary_shape),
                   0.0, representation)

    def side(self, sign: int) -> np.ndarray:
        return self.plus if sign > 0 else self.minus

    def as_W(self, basic: BasicState) -> "LinearField":
        if self.representation is Representation.W:
            return self
        return LinearField(to_W(self.minus, basic, -1), to_W(self.plus, basic, +1),
                           self.psi, self.t, Representation.W)

    def as_good(self, basic: BasicState) -> "LinearField":
        if self.representation is Representation.GOOD:
            return self
        return LinearField(from_W(self.minus, basic, -1), from_W(self.plus, basic, +1),
                           self.psi, self.t, Representation.GOOD)

    def copy(self) -> "LinearField":
        return LinearField(self.minus.copy(), self.plus.copy(), self.psi.copy(),
                           self.t, self.representation)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.minus)) and np.all(np.isfinite(self.plus))
                    and np.all(np.isfinite(self.psi)))


def boundary_conditions_W(
    W_minus: np.ndarray,
    W_plus: np.ndarray,
    psi: np.ndarray,
    basic: BasicState,
    source: Optional[np.ndarray] = None,
    dt_psi: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Residuals of the W-form boundary conditions, (2d+1, *boundary_shape).

    Args:
        W_minus: Trace of W- on x_1 = 0
        W_plus: Trace of W+
        psi: Front perturbation
        basic: Basic state
        source: Boundary source (zero when omitted)
        dt_psi: d_t psi (zero when omitted)
    """
    lay = basic.layout
    d = basic.dim
    st = basic.stencils
    bshape = basic.grid.boundary_shape
    psi = np.asarray(psi, dtype=float)
    s = np.zeros((2 * d + 1,) + bshape) if source is None else np.asarray(source, dtype=float)
    b = b_coefficients(basic)
    g = basic.grad_phi
    jump = W_plus - W_minus
    jump_F11 = basic.jump_F11

    out = np.empty((2 * d + 1,) + bshape)
    out[0] = basic.partial0(psi, dt_psi) - W_plus[lay.v(0)] + b[0] * psi - s[0]
    b_1 = b[1] - sum(g[j - 1] * b[1 + j] for j in range(1, d))
    s_1 = s[1] - sum(g[j - 1] * s[1 + j] for j in range(1, d))
    out[1] = jump[lay.v(0)] + b_1 * psi - s_1
    for a in range(1, d):
        out[1 + a] = jump[lay.v(a)] + b[1 + a] * psi - s[1 + a]
    _, grad = basic.varrho
    _, _, F_plus, _ = lay.split(from_W(W_plus, basic, +1))
    dvarrho = np.einsum("...ij,ij...->...", grad, F_plus)
    out[d + 1] = jump[lay.F(0, 0)] - jump_F11 * dvarrho + b[d + 1] * psi - s[d + 1]
    dpsi = st.boundary_grad(psi)
    for j in range(1, d):
        out[d + 1 + j] = (jump[lay.F(j, 0)] + jump_F11 * dpsi[j - 1]
                          + b[d + 1 + j] * psi - s[d + 1 + j])
    return out


@dataclass
class BoundaryMatricesW:
    """Boundary blocks of the W system on each side.

    Attributes:
        minus: Coefficient matrices at the boundary nodes of the minus side
        plus: Same on the plus side
        signature: (positive, negative, zero) eigenvalue counts of cal_A1a per side
    """
    minus: CoefficientMatrices
    plus: CoefficientMatrices
    signature: List[Tuple[int, int, int]] = field(default_factory=list)

    def side(self, sign: int) -> CoefficientMatrices:
        return self.plus if sign > 0 else self.minus


def _signature(M: np.ndarray, tol: float = 1e-10) -> Tuple[int, int, int]:
    vals = np.linalg.eigvalsh(M.reshape((-1,) + M.shape[-2:]))
    scale = max(1.0, float(np.max(np.abs(vals))))
    pos = np.sum(vals > tol * scale, axis=-1)
    neg = np.sum(vals < -tol * scale, axis=-1)
    # one pattern per side
    if np.any(pos != pos[0]) or np.any(neg != neg[0]):
        logger.warning("cal_A1a signature varies along the boundary")
    n = M.shape[-1]
    return int(pos[0]), int(neg[0]), int(n - pos[0] - neg[0])


def boundary_matrices_W(basic: BasicState) -> BoundaryMatricesW:
    """Assemble J, cal_A_i, cal_A1a and B at the boundary nodes of both sides."""
    def build():
        sides = []
        for s in (-1, +1):
            sides.append(assemble_J_and_calA(basic.trace(s), basic.lift(s).boundary_derivatives(),
                                             basic.params))
        sig = [_signature(m.cal_A1a) for m in sides]
        logger.debug(f"cal_A1a signatures (minus, plus): {sig}")
        return BoundaryMatricesW(sides[0], sides[1], sig)
    return basic._cached("boundary_matrices_W", build)
