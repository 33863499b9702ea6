"""Coefficient matrices of the symmetric thermoelastic system.

The system for U = (p, v, F, S) reads A0(U) d_t U + sum_i A_i(U) d_i U = 0 with

    A0  = diag(1/(rho c^2), rho I_d, rho a_k I_d (column k of F), 1)
    A_i : row p    -> v_i q V_p + V_{v_i}
          row v_a  -> delta_ai V_p + rho v_i V_{v_a} - sum_k rho a_k F_ik V_{F_ak}
          row F_ak -> -rho a_k F_ik V_{v_a} + rho a_k v_i V_{F_ak}
          row S    -> v_i V_S

where q = 1/(rho c^2). Inside every matrix rho := 1/det F and c^2 := c^2(rho(F), S).

Two renditions are kept side by side: dense (*batch, n, n) matrices used for
spectra and congruences, and matrix-free ``apply_*`` functions used on grid
fields. Fields are component-first arrays of shape (n, *grid).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from app.core.errors import DegenerateLift
from app.models.layout import UnknownLayout
from app.models.material import MaterialParams
from app.models.thermo_state import ThermoState, density_from_F

logger = logging.getLogger(__name__)

DEGENERATE_LIFT_TOL = 1e-8


@dataclass
class LiftDerivatives:
    """Derivatives of a lifting function Phi at the points of interest.

    Attributes:
        dt: d_t Phi
        d1: d_1 Phi
        grad: (d_2 Phi, ..., d_d Phi), shape (d-1, *shape)
    """
    dt: np.ndarray
    d1: np.ndarray
    grad: np.ndarray

    def __post_init__(self):
        self.dt = np.asarray(self.dt, dtype=float)
        self.d1 = np.asarray(self.d1, dtype=float)
        self.grad = np.asarray(self.grad, dtype=float)

    @classmethod
    def flat(cls, dim: int, sign: float = 1.0) -> "LiftDerivatives":
        """Derivatives of Phi = sign * x_1."""
        return cls(0.0, sign, np.zeros(dim - 1))

    def check(self) -> None:
        if np.any(np.abs(self.d1) < DEGENERATE_LIFT_TOL):
            raise DegenerateLift(f"|d1 Phi| < {DEGENERATE_LIFT_TOL}: min {np.min(np.abs(self.d1))}")


@dataclass
class _Coefficients:
    layout: UnknownLayout
    rho: np.ndarray
    q: np.ndarray
    v: np.ndarray
    F: np.ndarray
    S: np.ndarray
    a: np.ndarray


def _coefficients(U: np.ndarray, params: MaterialParams) -> _Coefficients:
    layout = UnknownLayout(params.dim)
    _, v, F, S = layout.split(U)
    rho = density_from_F(np.moveaxis(F, (0, 1), (-2, -1)))
    q = 1.0 / params.eos().bulk_modulus(rho, S)
    return _Coefficients(layout, rho, q, v, F, S, np.asarray(params.elastic, dtype=float))


# ---------------------------------------------------------------------------
# Dense matrices
# ---------------------------------------------------------------------------

def assemble_A0_dense(U: np.ndarray, params: MaterialParams) -> np.ndarray:
    """Dense A0 for a component-first state array, shape (*batch, n, n)."""
    c = _coefficients(U, params)
    lay = c.layout
    d = params.dim
    M = np.zeros(c.rho.shape + (lay.n, lay.n))
    M[..., lay.p, lay.p] = c.q
    for a in range(d):
        M[..., lay.v(a), lay.v(a)] = c.rho
        for k in range(d):
            M[..., lay.F(a, k), lay.F(a, k)] = c.rho * c.a[k]
    M[..., lay.s, lay.s] = 1.0
    return M


def assemble_Ai_dense(U: np.ndarray, params: MaterialParams, i: int) -> np.ndarray:
    """Dense A_i (0-based direction ``i``) for a component-first state array."""
    c = _coefficients(U, params)
    lay = c.layout
    d = params.dim
    vi = c.v[i]
    M = np.zeros(c.rho.shape + (lay.n, lay.n))
    M[..., lay.p, lay.p] = c.q * vi
    M[..., lay.p, lay.v(i)] = 1.0
    M[..., lay.v(i), lay.p] = 1.0
    for a in range(d):
        M[..., lay.v(a), lay.v(a)] = c.rho * vi
        for k in range(d):
            off = -c.rho * c.a[k] * c.F[i, k]
            M[..., lay.v(a), lay.F(a, k)] = off
            M[..., lay.F(a, k), lay.v(a)] = off
            M[..., lay.F(a, k), lay.F(a, k)] = c.rho * c.a[k] * vi
    M[..., lay.s, lay.s] = vi
    return M


def assemble_A(state: ThermoState, params: MaterialParams) -> List[np.ndarray]:
    """Return [A0, A1, ..., Ad] at a single admissible state.

    Raises:
        NonOrientationPreserving: If det F <= 0
        InvalidDensity: If the derived density is not positive

    Example:
        >>> params = MaterialParams(dim=2, gamma=1.4)
        >>> mats = assemble_A(ThermoState.at_rest(np.eye(2), params), params)
        >>> np.allclose(np.diag(mats[0]), [1 / 1.4, 1, 1, 1, 1, 1, 1, 1])
        True
    """
    U = state.to_vector()
    mats = [assemble_A0_dense(U, params)]
    mats += [assemble_Ai_dense(U, params, i) for i in range(params.dim)]
    logger.debug(f"Assembled A0..A{params.dim} at rho={state.density:.6g}")
    return mats


def combine_A1tilde(A0: np.ndarray, A: Sequence[np.ndarray], lift: LiftDerivatives) -> np.ndarray:
    """(A1 - d_t Phi A0 - sum_{i>=2} d_i Phi A_i) / d_1 Phi for dense (*batch, n, n) inputs."""
    lift.check()
    expand = lambda s: np.asarray(s)[..., None, None]
    M = A[0] - expand(lift.dt) * A0
    for j in range(1, len(A)):
        M = M - expand(lift.grad[j - 1]) * A[j]
    return M / expand(lift.d1)


def assemble_A1tilde(state: ThermoState, lift: LiftDerivatives, params: MaterialParams) -> np.ndarray:
    """Straightened normal matrix at a single state.

    Raises:
        DegenerateLift: If |d_1 Phi| < 1e-8
    """
    mats = assemble_A(state, params)
    return combine_A1tilde(mats[0], mats[1:], lift)


def normal_matrix(A0: np.ndarray, A: Sequence[np.ndarray], dt_phi, normal) -> np.ndarray:
    """Boundary matrix d_t phi A0 - N_l A_l."""
    expand = lambda s: np.asarray(s)[..., None, None]
    M = expand(dt_phi) * A0
    for l, Al in enumerate(A):
        M = M - expand(normal[l]) * Al
    return M


# ---------------------------------------------------------------------------
# Matrix-free application on fields
# ---------------------------------------------------------------------------

def apply_A0(U: np.ndarray, V: np.ndarray, params: MaterialParams) -> np.ndarray:
    """A0(U) V for component-first fields."""
    c = _coefficients(U, params)
    lay = c.layout
    out = np.empty_like(V, dtype=float)
    out[lay.p] = c.q * V[lay.p]
    out[lay.v_slice] = c.rho * V[lay.v_slice]
    for k in range(params.dim):
        out[lay.column(k)] = (c.rho * c.a[k]) * V[lay.column(k)]
    out[lay.s] = V[lay.s]
    return out


def _apply_Ai_coeff(c: _Coefficients, V: np.ndarray, i: int) -> np.ndarray:
    lay = c.layout
    d = lay.dim
    vi = c.v[i]
    out = np.empty_like(V, dtype=float)
    out[lay.p] = c.q * vi * V[lay.p] + V[lay.v(i)]
    for a in range(d):
        acc = c.rho * vi * V[lay.v(a)]
        for k in range(d):
            w = c.rho * c.a[k]
            acc = acc - w * c.F[i, k] * V[lay.F(a, k)]
            out[lay.F(a, k)] = -w * c.F[i, k] * V[lay.v(a)] + w * vi * V[lay.F(a, k)]
        out[lay.v(a)] = acc
    out[lay.v(i)] = out[lay.v(i)] + V[lay.p]
    out[lay.s] = vi * V[lay.s]
    return out


def apply_Ai(U: np.ndarray, V: np.ndarray, params: MaterialParams, i: int) -> np.ndarray:
    """A_i(U) V for component-first fields, 0-based direction ``i``."""
    return _apply_Ai_coeff(_coefficients(U, params), V, i)


def apply_A1tilde(U: np.ndarray, V: np.ndarray, lift: LiftDerivatives, params: MaterialParams) -> np.ndarray:
    """Straightened normal matrix applied to a field."""
    lift.check()
    c = _coefficients(U, params)
    out = _apply_Ai_coeff(c, V, 0) - lift.dt * apply_A0(U, V, params)
    for j in range(1, params.dim):
        out = out - lift.grad[j - 1] * _apply_Ai_coeff(c, V, j)
    return out / lift.d1


# ---------------------------------------------------------------------------
# Zeroth-order operator
# ---------------------------------------------------------------------------

def zeroth_order_apply(
    U: np.ndarray,
    alpha: np.ndarray,
    betas: Sequence[np.ndarray],
    V: np.ndarray,
    params: MaterialParams,
) -> np.ndarray:
    """Directional derivative term dA0(U)[V] alpha + sum_i dA_i(U)[V] beta_i.

    With alpha = d_t^Phi U and beta_i = d_i^Phi U this is the zeroth-order
    operator of the linearization; it is exactly linear in V.

    Args:
        U: Basic state field (n, *shape)
        alpha: Phi-time derivative of U
        betas: Phi-space derivatives of U, one per direction
        V: Perturbation field
        params: Material parameters

    Returns:
        Field of the same shape as V
    """
    c = _coefficients(U, params)
    lay = c.layout
    d = params.dim
    eos = params.eos()

    F_last = np.moveaxis(c.F, (0, 1), (-2, -1))
    Finv = np.moveaxis(np.linalg.inv(F_last), (-2, -1), (0, 1))
    _, _, VF, VS = lay.split(V)
    V_v = V[lay.v_slice]
    # d rho = -rho tr(F^{-1} dF)
    drho = -c.rho * np.einsum("ka...,ak...->...", Finv, VF)
    k_rho, k_s = eos.bulk_modulus_derivatives(c.rho, c.S)
    dq = -c.q * c.q * (k_rho * drho + k_s * VS)

    out = np.zeros_like(V, dtype=float)
    out[lay.p] = dq * alpha[lay.p]
    out[lay.v_slice] = drho * alpha[lay.v_slice]
    for k in range(d):
        out[lay.column(k)] = (drho * c.a[k]) * alpha[lay.column(k)]

    for i, beta in enumerate(betas):
        vi = c.v[i]
        d_rho_vi = drho * vi + c.rho * V_v[i]
        out[lay.p] += (V_v[i] * c.q + vi * dq) * beta[lay.p]
        for a in range(d):
            out[lay.v(a)] += d_rho_vi * beta[lay.v(a)]
            for k in range(d):
                d_rho_F = c.a[k] * (drho * c.F[i, k] + c.rho * VF[i, k])
                out[lay.v(a)] -= d_rho_F * beta[lay.F(a, k)]
                out[lay.F(a, k)] += -d_rho_F * beta[lay.v(a)] + c.a[k] * d_rho_vi * beta[lay.F(a, k)]
        out[lay.s] += V_v[i] * beta[lay.s]
    return out


def zeroth_order_matrix(
    U: np.ndarray,
    alpha: np.ndarray,
    betas: Sequence[np.ndarray],
    params: MaterialParams,
) -> np.ndarray:
    """Dense zeroth-order matrix, shape (*shape, n, n), by applying it to unit vectors."""
    n = params.n_unknowns
    shape = U.shape[1:]
    M = np.zeros(shape + (n, n))
    for col in range(n):
        e = np.zeros((n,) + shape)
        e[col] = 1.0
        M[..., :, col] = np.moveaxis(zeroth_order_apply(U, alpha, betas, e, params), 0, -1)
    return M


# ---------------------------------------------------------------------------
# Independent oracle and export
# ---------------------------------------------------------------------------

def expanded_residual(
    U: np.ndarray,
    dt_U: np.ndarray,
    grad_U: Sequence[np.ndarray],
    params: MaterialParams,
) -> np.ndarray:
    """Residual of the expanded balance laws, row-weighted like the symmetric form.

    Rows: (1/(rho c^2))(d_t p + v.grad p) + div v; rho (D_t v_a) + d_a p
    - sum rho a_k F_ik d_i F_ak; rho a_k (D_t F_ak - F_ik d_i v_a); D_t S,
    with D_t = d_t + v_i d_i. Written component by component with no matrix
    so it can check the symmetric assembly.
    """
    c = _coefficients(U, params)
    lay = c.layout
    d = params.dim
    out = np.zeros_like(U, dtype=float)

    def material(idx):
        total = dt_U[idx].copy()
        for i in range(d):
            total = total + c.v[i] * grad_U[i][idx]
        return total

    out[lay.p] = c.q * material(lay.p) + sum(grad_U[i][lay.v(i)] for i in range(d))
    for a in range(d):
        row = c.rho * material(lay.v(a)) + grad_U[a][lay.p]
        for i in range(d):
            for k in range(d):
                row = row - c.rho * c.a[k] * c.F[i, k] * grad_U[i][lay.F(a, k)]
        out[lay.v(a)] = row
        for k in range(d):
            stretch = sum(c.F[i, k] * grad_U[i][lay.v(a)] for i in range(d))
            out[lay.F(a, k)] = c.rho * c.a[k] * (material(lay.F(a, k)) - stretch)
    out[lay.s] = material(lay.s)
    return out


def symmetric_residual(
    U: np.ndarray,
    dt_U: np.ndarray,
    grad_U: Sequence[np.ndarray],
    params: MaterialParams,
) -> np.ndarray:
    """A0 d_t U + sum_i A_i d_i U with the matrix-free operators."""
    c = _coefficients(U, params)
    out = apply_A0(U, dt_U, params)
    for i in range(params.dim):
        out = out + _apply_Ai_coeff(c, grad_U[i], i)
    return out


def dump_matrix_csv(matrix: np.ndarray, path: Union[str, Path], header: Optional[str] = None) -> None:
    """Write a dense matrix row-major with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(matrix), delimiter=",", fmt="%.17g",
               header=header or "", comments="")
    logger.info(f"Matrix {np.shape(matrix)} written to {path}")
