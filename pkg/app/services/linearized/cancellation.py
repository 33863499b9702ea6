"""Boundary quadratic form of the tangential energy and its cancellation.

At each boundary node, with D = D_tan^beta (beta over (t, x_2, ..., x_d)),
varrho = varrho(F+), dvarrho its F-gradient and [F_11] the basic jump:

    Q    = sum_+- cal_A1a DW . DW = Q1 + Q2
    Q1   = 2 [DW_1 DW_{d+1}]
    Q2   = -2 r [sum_j DW_j DW_{d+j}]
    Q1a  = 2 [F_11] dvarrho : DF+  DW_1+
    Q2a  = 2 varrho [F_11] sum_j D d_j psi  DW_j+
    Q2b  = -2 varrho [F_11] sum_j D psi  D d_j W_j+
    Q2c  = 2 varrho [F_11] D psi  D(varrho^{-1} dvarrho : d_0 F+)
    Q2d  = -2 [F_11] dvarrho : DF+  D d_0 psi

The front condition turns Q1a + Q2d into 2 [F_11] dvarrho : DF+ D(b_0 psi - s_0),
up to the front-condition residual.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import ConfigurationError, PreconditionResidualTooLarge
from app.models.history import TraceHistory
from app.services.linearized.basic_state import BasicState
from app.services.linearized.operators import b_coefficients, zeroth_order
from app.services.linearized.wvars import LinearField, boundary_conditions_W, boundary_matrices_W, from_W
from app.services.straightening.stencils import Stencils

logger = logging.getLogger(__name__)

PRECONDITION_TOL = 1e-6


class BoundaryHistory:
    """Recent boundary traces of W+-, psi and the boundary source.

    Args:
        depth: Levels kept (at least beta_t + 3 for the checks below)
        dt: Time step between records
    """

    def __init__(self, depth: int, dt: float):
        self.W_minus = TraceHistory(depth, dt)
        self.W_plus = TraceHistory(depth, dt)
        self.psi = TraceHistory(depth, dt)
        self.source = TraceHistory(depth, dt)
        self.interior_source: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def record(self, state: LinearField, basic: BasicState, source: Optional[np.ndarray] = None,
               interior_source: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> None:
        W = state.as_W(basic)
        st = basic.stencils
        d = basic.dim
        self.W_minus.append(state.t, st.trace(W.minus))
        self.W_plus.append(state.t, st.trace(W.plus))
        self.psi.append(state.t, state.psi)
        if source is None:
            source = np.zeros((2 * d + 1,) + basic.grid.boundary_shape)
        self.source.append(state.t, source)
        self.interior_source = interior_source

    def W(self, sign: int) -> TraceHistory:
        return self.W_plus if sign > 0 else self.W_minus

    def __len__(self) -> int:
        return len(self.psi)


def apply_D(beta: Sequence[int], time_derivative: Callable[[int], np.ndarray],
            stencils: Stencils) -> np.ndarray:
    """D_tan^beta of a boundary quantity given its time derivatives at the newest level."""
    beta = tuple(beta)
    out = time_derivative(beta[0])
    for j, count in enumerate(beta[1:], start=2):
        for _ in range(count):
            out = stencils.dtan(out, j)
    return out


@dataclass
class CancellationReport:
    """Pieces of the boundary quadratic form at every boundary node.

    Attributes:
        beta: Multi-index (beta_t, beta_2, ..., beta_d)
        pieces: Name -> boundary array
        bc_residual: Max-norm of the non-front boundary conditions
        front_residual: Max-norm of the front condition
        key2: Max-norm of the boundary restriction of the F equations
        key3b: Max-norm of the tangential divergence identity on the plus side
    """
    beta: Tuple[int, ...]
    pieces: Dict[str, np.ndarray] = field(default_factory=dict)
    bc_residual: float = 0.0
    front_residual: float = 0.0
    key2: float = 0.0
    key3b: float = 0.0

    @property
    def cancellation_residual(self) -> float:
        return float(np.max(np.abs(self.pieces["cancellation"])))

    def to_dict(self) -> Dict:
        out = {"beta": list(self.beta)}
        for name, values in self.pieces.items():
            out[name] = float(np.max(np.abs(values)))
        out.update({
            "bc_residual": self.bc_residual,
            "front_residual": self.front_residual,
            "key2": self.key2,
            "key3b": self.key3b,
        })
        return out


def _explicit_F_rhs(basic: BasicState, Vdot_trace: np.ndarray, f_trace: Optional[np.ndarray],
                    sign: int) -> np.ndarray:
    """E_ij = (f~ - C V')_{F_ij} / (rho a_j) on the boundary, shape (d, d, *boundary_shape)."""
    lay = basic.layout
    st = basic.stencils
    diffs = basic.derivatives(sign)
    C = zeroth_order_boundary(basic, Vdot_trace, sign, diffs)
    rhs = -C if f_trace is None else f_trace - C
    rho = st.trace(basic.density(sign))
    _, _, E, _ = lay.split(rhs)
    a = np.asarray(basic.params.elastic, dtype=float)
    return E / (rho[None, None] * a.reshape((1, -1) + (1,) * rho.ndim))


def zeroth_order_boundary(basic: BasicState, Vdot_trace: np.ndarray, sign: int, diffs=None) -> np.ndarray:
    """C(U, Phi) V' evaluated pointwise on boundary traces."""
    from app.services.hyperbolic.assembly import zeroth_order_apply

    st = basic.stencils
    diffs = diffs or basic.derivatives(sign)
    alpha = st.trace(diffs.dt)
    betas = [st.trace(b) for b in diffs.d]
    return zeroth_order_apply(basic.trace(sign), alpha, betas, Vdot_trace, basic.params)


def key2_residual(history: BoundaryHistory, basic: BasicState, sign: int) -> np.ndarray:
    """d_0 F_ij - sum_{k>=2} F_kj d_k v_i - E_ij on the boundary, j = 2..d."""
    d = basic.dim
    lay = basic.layout
    st = basic.stencils
    hist = history.W(sign)
    V = from_W(hist.latest, basic, sign)
    dt_V = from_W(hist.derivative(1), basic, sign)
    _, v, F, _ = lay.split(V)
    _, _, dt_F, _ = lay.split(dt_V)
    F0 = np.moveaxis(basic.F_trace(sign), (-2, -1), (0, 1))
    f_trace = None
    if history.interior_source is not None:
        f_trace = st.trace(history.interior_source[1 if sign > 0 else 0])
    E = _explicit_F_rhs(basic, V, f_trace, sign)
    out = []
    for j in range(1, d):
        for i in range(d):
            d0F = basic.partial0(F[i, j], dt_F[i, j])
            stretch = sum(F0[k, j] * st.dtan(v[i], k + 1) for k in range(1, d))
            out.append(d0F - stretch - E[i, j])
    return np.stack(out)


def key3b_residual(history: BoundaryHistory, basic: BasicState) -> np.ndarray:
    """sum_{j>=2} d_j W_j+ + varrho^{-1} dvarrho : d_0 F+ + tr(F'^{-1} E') on the boundary."""
    d = basic.dim
    lay = basic.layout
    st = basic.stencils
    hist = history.W_plus
    W = hist.latest
    V = from_W(W, basic, +1)
    dt_V = from_W(hist.derivative(1), basic, +1)
    _, _, F, _ = lay.split(V)
    _, _, dt_F, _ = lay.split(dt_V)
    value, grad = basic.varrho
    d0F = np.stack([np.stack([basic.partial0(F[i, j], dt_F[i, j]) for j in range(d)]) for i in range(d)])
    f_trace = None
    if history.interior_source is not None:
        f_trace = st.trace(history.interior_source[1])
    E = _explicit_F_rhs(basic, V, f_trace, +1)
    minor_inv = np.linalg.inv(basic.F_trace(+1)[..., 1:, 1:])
    E_t = np.moveaxis(E[1:, 1:], (0, 1), (-2, -1))
    trace_term = np.einsum("...ij,...ji->...", minor_inv, E_t)
    divergence = sum(st.dtan(W[lay.v(j)], j + 1) for j in range(1, d))
    transport = np.einsum("...ij,ij...->...", grad, d0F) / value
    return divergence + transport + trace_term


def cancellation_check(
    history: BoundaryHistory,
    basic: BasicState,
    beta: Sequence[int],
    tol: float = PRECONDITION_TOL,
) -> CancellationReport:
    """Evaluate the boundary quadratic form pieces and the cancellation at the newest level.

    Args:
        history: Recorded boundary traces (W-form), front and boundary source
        basic: Basic state
        beta: (beta_t, beta_2, ..., beta_d)
        tol: Limit on the non-front boundary-condition residuals

    Returns:
        CancellationReport

    Raises:
        ConfigurationError: If beta has the wrong length or negative entries
        InsufficientHistory: If fewer than beta_t + 3 levels are stored
        PreconditionResidualTooLarge: If the boundary conditions fail by more than ``tol``
    """
    d = basic.dim
    beta = tuple(int(b) for b in beta)
    if len(beta) != d or any(b < 0 for b in beta):
        raise ConfigurationError(f"beta must have {d} nonnegative entries, got {beta}")
    lay = basic.layout
    st = basic.stencils
    hist_psi = history.psi
    b = b_coefficients(basic)

    psi = hist_psi.latest
    dt_psi = hist_psi.derivative(1)
    W_m, W_p = history.W_minus.latest, history.W_plus.latest
    bc = boundary_conditions_W(W_m, W_p, psi, basic, history.source.latest, dt_psi)
    bc_res = float(np.max(np.abs(bc[1:])))
    if bc_res > tol:
        raise PreconditionResidualTooLarge(f"boundary-condition residual {bc_res:.3e} > {tol:.0e}")
    if bc_res > 0.1 * tol:
        logger.warning(f"Boundary-condition residual {bc_res:.3e} is close to the limit {tol:.0e}")

    def W_time(sign):
        return lambda k: history.W(sign).derivative(k)

    def F_time(k):
        _, _, F, _ = lay.split(from_W(history.W_plus.derivative(k), basic, +1))
        return F

    def d0_time(hist_k, hist_k1):
        return hist_k1 + sum(basic.v_tan_plus[j - 1] * st.dtan(hist_k, j + 1) for j in range(1, d))

    def d0_psi(k):
        return d0_time(hist_psi.derivative(k), hist_psi.derivative(k + 1))

    def d0F_contracted(k):
        F_k, F_k1 = F_time(k), F_time(k + 1)
        d0F = np.stack([np.stack([d0_time(F_k[i, j], F_k1[i, j]) for j in range(d)]) for i in range(d)])
        return np.einsum("...ij,ij...->...", grad, d0F) / value

    value, grad = basic.varrho
    jF = basic.jump_F11
    def D(fn):
        return apply_D(beta, fn, st)

    DW = {s: D(W_time(s)) for s in (-1, +1)}
    DF = D(F_time)
    Dpsi = D(hist_psi.derivative)
    dvarrho_DF = np.einsum("...ij,ij...->...", grad, DF)

    r = {s: st.trace(basic.rho_F1N(s)) for s in (-1, +1)}
    Q1 = 2.0 * (DW[+1][lay.v(0)] * DW[+1][lay.F(0, 0)] - DW[-1][lay.v(0)] * DW[-1][lay.F(0, 0)])
    Q2 = -2.0 * sum(
        r[+1] * DW[+1][lay.v(j)] * DW[+1][lay.F(j, 0)] - r[-1] * DW[-1][lay.v(j)] * DW[-1][lay.F(j, 0)]
        for j in range(1, d)
    )
    mats = boundary_matrices_W(basic)
    Q = sum(
        np.einsum("i...,...ij,j...->...", DW[s], mats.side(s).cal_A1a, DW[s]) for s in (-1, +1)
    )

    Q1a = 2.0 * jF * dvarrho_DF * DW[+1][lay.v(0)]
    Q2a = 2.0 * value * jF * sum(
        D(lambda k, j=j: st.dtan(hist_psi.derivative(k), j + 1)) * DW[+1][lay.v(j)] for j in range(1, d)
    )
    Q2b = -2.0 * value * jF * Dpsi * sum(
        D(lambda k, j=j: st.dtan(history.W_plus.derivative(k)[lay.v(j)], j + 1)) for j in range(1, d)
    )
    Q2c = 2.0 * value * jF * Dpsi * D(d0F_contracted)
    Q2d = -2.0 * jF * dvarrho_DF * D(d0_psi)
    remainder = 2.0 * jF * dvarrho_DF * D(
        lambda k: b[0] * hist_psi.derivative(k) - history.source.derivative(k)[0]
    )
    cancellation = Q1a + Q2d - remainder

    key2 = max(float(np.max(np.abs(key2_residual(history, basic, s)))) for s in (-1, +1))
    key3b = float(np.max(np.abs(key3b_residual(history, basic))))

    report = CancellationReport(
        beta=beta,
        pieces={
            "Q": Q, "Q1": Q1, "Q2": Q2, "Q_split": Q - Q1 - Q2,
            "Q1a": Q1a, "Q2a": Q2a, "Q2b": Q2b, "Q2c": Q2c, "Q2d": Q2d,
            "remainder": remainder, "cancellation": cancellation,
        },
        bc_residual=bc_res,
        front_residual=float(np.max(np.abs(bc[0]))),
        key2=key2,
        key3b=key3b,
    )
    logger.debug(f"Cancellation check beta={beta}: residual {report.cancellation_residual:.3e}")
    return report
