"""Change of variables V = J W and the congruent coefficient matrices.

W separates the noncharacteristic boundary unknowns. With r = rho F_1N,
N = (1, -d_2 Phi, ..., -d_d Phi) and 0-based storage indices

    W_0 = p
    W_1 = v_1 - sum_{j>=2} d_j Phi v_j          (= v . N)
    W_{d+1} = p - r F_11
    W_{d+j} = d_j Phi F_11 + F_j1              (j = 2..d)

and all other components are copied. The congruences cal_A_i = J^T A_i J
(with A~_1 in place of A_1) carry the energy structure of the W system.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from app.core.errors import DegenerateF1N
from app.models.layout import UnknownLayout
from app.models.material import MaterialParams
from app.models.thermo_state import density_from_F
from app.services.hyperbolic.assembly import (
    LiftDerivatives,
    assemble_A0_dense,
    assemble_Ai_dense,
    combine_A1tilde,
    zeroth_order_matrix,
)
from app.utils.helpers import matrix_field

logger = logging.getLogger(__name__)

DEGENERATE_F1N_TOL = 1e-10

# derivative(field, i) with field of shape (m, *grid) and 1-based direction i
Derivative = Callable[[np.ndarray, int], np.ndarray]


@dataclass
class CoefficientMatrices:
    """Dense coefficient matrices at one or many points, each (*shape, n, n).

    Attributes:
        n: Number of unknowns d^2 + d + 2
        A0: Symmetric positive definite time matrix
        A: Spatial matrices A_1..A_d
        A1tilde: Straightened normal matrix
        J: Change of variables V = J W
        Jinv: Its inverse
        cal_A: [cal_A_0, cal_A_1, ..., cal_A_d]
        cal_A1a: Boundary part of cal_A_1
        Bmat: Selector paired with cal_A1a
        cal_A4: Zeroth-order matrix (filled by assemble_calA4)
    """
    n: int
    A0: np.ndarray
    A: List[np.ndarray]
    A1tilde: np.ndarray
    J: np.ndarray
    Jinv: np.ndarray
    cal_A: List[np.ndarray]
    cal_A1a: np.ndarray
    Bmat: np.ndarray
    cal_A4: Optional[np.ndarray] = None
    rho_F1N: np.ndarray = field(default_factory=lambda: np.array(1.0))

    @property
    def cal_A1b(self) -> np.ndarray:
        """Interior remainder cal_A_1 - cal_A1a (vanishes on the boundary)."""
        return self.cal_A[1] - self.cal_A1a


def rho_F1N(U: np.ndarray, lift: LiftDerivatives, params: MaterialParams) -> np.ndarray:
    """rho F_1N with N built from the lift gradient."""
    layout = UnknownLayout(params.dim)
    _, _, F, _ = layout.split(U)
    F_last = np.moveaxis(F, (0, 1), (-2, -1))
    rho = density_from_F(F_last)
    F1N = F[0, 0] - sum(lift.grad[j - 1] * F[j, 0] for j in range(1, params.dim))
    return rho * F1N


def _check_r(r: np.ndarray) -> None:
    if np.any(np.abs(r) < DEGENERATE_F1N_TOL):
        raise DegenerateF1N(f"|rho F_1N| < {DEGENERATE_F1N_TOL}: min {np.min(np.abs(r))}")


def transform_J(r: np.ndarray, grad: np.ndarray, dim: int) -> np.ndarray:
    """Dense J with V = J W, shape (*shape, n, n).

    Raises:
        DegenerateF1N: If |rho F_1N| < 1e-10
    """
    r = np.asarray(r, dtype=float)
    _check_r(r)
    lay = UnknownLayout(dim)
    n = lay.n
    J = np.broadcast_to(np.eye(n), r.shape + (n, n)).copy()
    f11 = lay.F(0, 0)
    J[..., f11, lay.p] = 1.0 / r
    J[..., f11, f11] = -1.0 / r
    for j in range(1, dim):
        g = grad[j - 1]
        J[..., lay.v(0), lay.v(j)] = g
        J[..., lay.F(j, 0), lay.p] = -g / r
        J[..., lay.F(j, 0), f11] = g / r
    return J


def transform_Jinv(r: np.ndarray, grad: np.ndarray, dim: int) -> np.ndarray:
    """Dense J^{-1} with W = J^{-1} V."""
    r = np.asarray(r, dtype=float)
    _check_r(r)
    lay = UnknownLayout(dim)
    n = lay.n
    Jinv = np.broadcast_to(np.eye(n), r.shape + (n, n)).copy()
    f11 = lay.F(0, 0)
    Jinv[..., f11, lay.p] = 1.0
    Jinv[..., f11, f11] = -r
    for j in range(1, dim):
        g = grad[j - 1]
        Jinv[..., lay.v(0), lay.v(j)] = -g
        Jinv[..., lay.F(j, 0), f11] = g
    return Jinv


def boundary_block(r: np.ndarray, sign, dim: int, inverse: bool = False) -> np.ndarray:
    """+-[[0], [0, A], [A, 0], [0]] with A = diag(1, -r I_{d-1}) (or A^{-1}).

    Rows 1..d couple to columns d+1..2d.
    """
    r = np.asarray(r, dtype=float)
    sign = np.asarray(sign, dtype=float)
    lay = UnknownLayout(dim)
    shape = np.broadcast_shapes(r.shape, sign.shape)
    M = np.zeros(shape + (lay.n, lay.n))
    diag = [np.ones(shape)] + [-r * np.ones(shape)] * (dim - 1)
    for j in range(dim):
        value = sign * (1.0 / diag[j] if inverse else diag[j])
        M[..., 1 + j, dim + 1 + j] = value
        M[..., dim + 1 + j, 1 + j] = value
    return M


def _congruence(J: np.ndarray, M: np.ndarray) -> np.ndarray:
    out = np.einsum("...ki,...kl,...lj->...ij", J, M, J)
    return 0.5 * (out + np.swapaxes(out, -1, -2))


def assemble_J_and_calA(U: np.ndarray, lift: LiftDerivatives, params: MaterialParams) -> CoefficientMatrices:
    """Assemble J, J^{-1} and the congruent matrices at basic-state points.

    Args:
        U: Basic state values, component-first (n, *shape)
        lift: Lift derivatives at the same points
        params: Material parameters (unit elastic coefficients for the boundary block)

    Returns:
        CoefficientMatrices with cal_A4 left empty

    Raises:
        DegenerateF1N: If |rho F_1N| < 1e-10
        DegenerateLift: If |d_1 Phi| < 1e-8
    """
    d = params.dim
    r = rho_F1N(U, lift, params)
    J = transform_J(r, lift.grad, d)
    Jinv = transform_Jinv(r, lift.grad, d)
    A0 = assemble_A0_dense(U, params)
    A = [assemble_Ai_dense(U, params, i) for i in range(d)]
    A1t = combine_A1tilde(A0, A, lift)
    cal = [_congruence(J, A0), _congruence(J, A1t)]
    cal += [_congruence(J, A[i]) for i in range(1, d)]
    sign = np.sign(lift.d1)
    cal_A1a = boundary_block(r, sign, d)
    Bmat = boundary_block(r, sign, d, inverse=True)
    return CoefficientMatrices(
        n=params.n_unknowns, A0=A0, A=A, A1tilde=A1t, J=J, Jinv=Jinv,
        cal_A=cal, cal_A1a=cal_A1a, Bmat=Bmat, rho_F1N=r,
    )


def assemble_calA4(
    U: np.ndarray,
    alpha: np.ndarray,
    betas: Sequence[np.ndarray],
    lift: LiftDerivatives,
    params: MaterialParams,
    derivative: Derivative,
    dt_J: Optional[np.ndarray] = None,
    coeffs: Optional[CoefficientMatrices] = None,
) -> np.ndarray:
    """cal_A4 = J^T (A0 d_t J + A~_1 d_1 J + sum_{i>=2} A_i d_i J + C J).

    Args:
        U: Basic state field (n, *grid)
        alpha: d_t^Phi U
        betas: d_i^Phi U for i = 1..d
        lift: Lift derivatives on the grid
        params: Material parameters
        derivative: Caller stencil, derivative(field, i) for 1-based i
        dt_J: Time derivative of J, (*grid, n, n); zero for stationary basic states
        coeffs: Previously assembled matrices at the same points

    Returns:
        Dense field (*grid, n, n)
    """
    coeffs = coeffs or assemble_J_and_calA(U, lift, params)
    n = coeffs.n
    grid_shape = U.shape[1:]
    J_entries = matrix_field(coeffs.J)

    def dJ(i: int) -> np.ndarray:
        dj = derivative(J_entries, i)
        return np.moveaxis(dj, 0, -1).reshape(grid_shape + (n, n))

    LJ = coeffs.A1tilde @ dJ(1)
    for i in range(2, params.dim + 1):
        LJ = LJ + coeffs.A[i - 1] @ dJ(i)
    if dt_J is not None:
        LJ = LJ + coeffs.A0 @ dt_J
    C = zeroth_order_matrix(U, alpha, betas, params)
    A4 = np.swapaxes(coeffs.J, -1, -2) @ (LJ + C @ coeffs.J)
    coeffs.cal_A4 = A4
    return A4
