"""Time integration of the effective linear problem with the front equation.

On each side the good unknown solves

    A0 d_t V' = f~ - (A~_1 d_1 + sum_{i>=2} A_i d_i + C) V'

discretized with the field stencils plus the local Lax-Friedrichs dissipation of
linearly reconstructed interface states (a fourth difference), and the front
follows d_t psi = g_0 - (first boundary row without d_t psi). Steps
are SSP RK2 (Heun). After every stage the 2d incoming characteristic
amplitudes at x_1 = 0 are solved from the remaining boundary rows, and all
components at x_1 = x_max are extrapolated.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.errors import (
    BoundarySolveSingular,
    CFLViolation,
    ConfigurationError,
    MultiplicityMismatch,
    NaNDetected,
)
from app.services.hyperbolic.assembly import assemble_A0_dense, assemble_Ai_dense, combine_A1tilde
from app.services.linearized.basic_state import BasicState
from app.services.linearized.boundary_lift import BoundaryLift, lift_boundary_source
from app.services.linearized.operators import apply_Bprime, apply_Bprime_e, apply_Lprime_e
from app.services.linearized.wvars import LinearField
from app.services.solver.ledger import EnergyLedger
from app.services.solver.sources import SourceModel
from app.services.straightening.stencils import TangentialScheme

logger = logging.getLogger(__name__)

SIDES = (-1, +1)
INCOMING_TOL = 1e-8
SINGULAR_COND = 1e8
FILTER_STRENGTH = 36.0
FILTER_ORDER = 8


def _along(ndim: int, axis: int, sl: slice) -> Tuple[slice, ...]:
    index = [slice(None)] * ndim
    index[axis] = sl
    return tuple(index)


def llf_dissipation(u: np.ndarray, alpha: np.ndarray, axis: int, h: float, periodic: bool) -> np.ndarray:
    """(a_{i+1/2} J_{i+1/2} - a_{i-1/2} J_{i-1/2}) / (2h), a_{i+1/2} = max(a_i, a_{i+1}).

    J is the interface jump of the central-slope linear reconstructions,
    J_{i+1/2} = -(u_{i+2} - 3 u_{i+1} + 3 u_i - u_{i-1}) / 4, so the term is a
    fourth difference and O(h^3) on smooth data. ``axis`` is negative so
    that ``alpha`` (spatial axes only) and a component-first ``u`` share it.
    Without periodicity the outermost interfaces reuse the nearest complete
    third difference and the end nodes get no dissipation.

    Example:
        >>> u = np.array([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
        >>> llf_dissipation(u, np.ones(7), -1, 1.0, periodic=True).tolist()
        [0.0, -0.125, 0.5, -0.75, 0.5, -0.125, 0.0]
    """
    if periodic:
        a_half = np.maximum(alpha, np.roll(alpha, -1, axis=axis))
        third = (np.roll(u, -2, axis=axis) - 3.0 * np.roll(u, -1, axis=axis)
                 + 3.0 * u - np.roll(u, 1, axis=axis))
        flux = -0.25 * a_half * third
        return (flux - np.roll(flux, 1, axis=axis)) / (2.0 * h)
    n = u.shape[axis]

    def cut(start, stop):
        return u[_along(u.ndim, axis, slice(start, stop))]

    inner = cut(3, None) - 3.0 * cut(2, n - 1) + 3.0 * cut(1, n - 2) - cut(0, n - 3)
    first = inner[_along(u.ndim, axis, slice(0, 1))]
    last = inner[_along(u.ndim, axis, slice(-1, None))]
    third = np.concatenate([first, inner, last], axis=axis)
    lo, hi = slice(0, n - 1), slice(1, n)
    a_half = np.maximum(alpha[_along(alpha.ndim, axis, lo)], alpha[_along(alpha.ndim, axis, hi)])
    flux = -0.25 * a_half * third
    out = np.zeros_like(u)
    out[_along(u.ndim, axis, slice(1, n - 1))] = (
        flux[_along(u.ndim, axis, slice(1, None))] - flux[_along(u.ndim, axis, slice(0, -1))]
    ) / (2.0 * h)
    return out


def _scaled_spectrum(A0: np.ndarray, M: np.ndarray):
    scale = 1.0 / np.sqrt(np.diagonal(A0, axis1=-2, axis2=-1))
    S = M * scale[..., :, None] * scale[..., None, :]
    return scale, S


def local_speeds(basic: BasicState, sign: int, direction: int) -> np.ndarray:
    """max |eig(A0^{-1} M)| per node, M = A~_1 (direction 1) or A_i."""
    params = basic.params
    U = basic.field(sign)
    A0 = assemble_A0_dense(U, params)
    if direction == 1:
        A = [assemble_Ai_dense(U, params, i) for i in range(basic.dim)]
        M = combine_A1tilde(A0, A, basic.lift(sign).derivatives())
    else:
        M = assemble_Ai_dense(U, params, direction - 1)
    _, S = _scaled_spectrum(A0, M)
    return np.max(np.abs(np.linalg.eigvalsh(S)), axis=-1)


def incoming_modes(basic: BasicState, sign: int) -> np.ndarray:
    """A0-orthonormal eigenvectors of A~_1 with positive eigenvalue at x_1 = 0.

    Returns:
        (d, n, *boundary_shape)

    Raises:
        MultiplicityMismatch: If some node does not have exactly d incoming modes
    """
    params = basic.params
    d = basic.dim
    Ub = basic.trace(sign)
    A0 = assemble_A0_dense(Ub, params)
    A = [assemble_Ai_dense(Ub, params, i) for i in range(d)]
    M = combine_A1tilde(A0, A, basic.lift(sign).boundary_derivatives())
    scale, S = _scaled_spectrum(A0, M)
    vals, vecs = np.linalg.eigh(S)
    tol = INCOMING_TOL * max(1.0, float(np.max(np.abs(vals))))
    count = np.sum(vals > tol, axis=-1)
    if np.any(count != d):
        raise MultiplicityMismatch(
            f"side {sign:+d}: expected {d} incoming modes, found {sorted(set(count.ravel().tolist()))}"
        )
    r = scale[..., :, None] * vecs[..., :, -d:]
    return np.moveaxis(r, (-1, -2), (0, 1))


@dataclass
class BoundaryClosure:
    """Incoming modes per side and the inverse of their boundary-row matrix.

    Attributes:
        modes: (minus, plus), each (d, n, *boundary_shape)
        inverse: (*boundary_shape, 2d, 2d)
        condition: Largest condition number over the boundary nodes
    """
    modes: Tuple[np.ndarray, np.ndarray]
    inverse: np.ndarray
    condition: float


def boundary_closure(basic: BasicState) -> BoundaryClosure:
    """Boundary rows 1..2d of B' on the incoming modes, cached on the basic state.

    Raises:
        BoundarySolveSingular: If the 2d x 2d system has cond > 1e8
    """
    def build():
        d = basic.dim
        n = basic.layout.n
        bshape = basic.grid.boundary_shape
        modes = tuple(incoming_modes(basic, s) for s in SIDES)
        zero = np.zeros((n,) + bshape)
        zero_psi = np.zeros(bshape)
        M = np.zeros(bshape + (2 * d, 2 * d))
        col = 0
        for k in range(2):
            for mode in modes[k]:
                traces = [zero, zero]
                traces[k] = mode
                rows = apply_Bprime(traces[0], traces[1], zero_psi, basic)[1:]
                M[..., :, col] = np.moveaxis(rows, 0, -1)
                col += 1
        cond = float(np.max(np.linalg.cond(M.reshape((-1, 2 * d, 2 * d)))))
        if not np.isfinite(cond) or cond > SINGULAR_COND:
            raise BoundarySolveSingular(f"incoming-amplitude system cond {cond:.3e} > {SINGULAR_COND:.0e}")
        logger.debug(f"Boundary closure built, cond {cond:.3e}")
        return BoundaryClosure(modes, np.linalg.inv(M), cond)
    return basic._cached("boundary_closure", build)


def spectral_filter(u: np.ndarray, grid, axes: List[int]) -> np.ndarray:
    """Exponential filter exp(-36 eta^8), eta = |k|/k_max, along periodic axes."""
    k = np.abs(np.fft.fftfreq(grid.n_tan, d=1.0 / grid.n_tan))
    sigma = np.exp(-FILTER_STRENGTH * (k / (grid.n_tan // 2)) ** FILTER_ORDER)
    out = u
    for axis in axes:
        shape = [1] * u.ndim
        shape[axis] = grid.n_tan
        out = np.real(np.fft.ifft(np.fft.fft(out, axis=axis) * sigma.reshape(shape), axis=axis))
    return out


def _cfl_step(grid, speeds: Dict[int, List[np.ndarray]]) -> float:
    rate = sum(max(float(np.max(speeds[s][i - 1])) for s in SIDES) / grid.spacing(i)
               for i in range(1, grid.dim + 1))
    return grid.cfl / rate


def cfl_step(basic: BasicState) -> float:
    """cfl / sum_i (max speed_i / h_i) over both sides of the basic state."""
    speeds = {s: [local_speeds(basic, s, i) for i in range(1, basic.dim + 1)] for s in SIDES}
    return _cfl_step(basic.grid, speeds)


def doubling_steps(basics: Sequence[BasicState], final_time: float) -> List[int]:
    """Step counts n, 2n, 4n, ... for a grid family, each within its CFL bound.

    With these counts dt halves exactly from grid to grid, so measured orders
    are not skewed by rounding the step count.
    """
    n = max(math.ceil(final_time * 2 ** k / cfl_step(b) - 1e-12) for k, b in enumerate(basics))
    return [max(1, n) * 2 ** k for k in range(len(basics))]


class LinearSolver:
    """RK2 integrator for (V'-, V'+, psi) around a basic state.

    Args:
        basic: Basic state (its stencils fix the tangential scheme)
        sources: Interior and boundary sources
        homogenized: Lift g into the interior and solve with zero boundary data
        dt: Time step; defaults to the CFL bound

    Raises:
        CFLViolation: If ``dt`` exceeds the CFL bound
        MultiplicityMismatch: If the boundary spectrum has the wrong pattern
        BoundarySolveSingular: If the incoming-amplitude system is singular
    """

    def __init__(self, basic: BasicState, sources: SourceModel, homogenized: bool = False,
                 dt: Optional[float] = None):
        self.basic = basic
        self.sources = sources
        self.homogenized = homogenized and sources.has_boundary
        self.grid = basic.grid
        self.spectral = basic.stencils.tangential is TangentialScheme.SPECTRAL
        params = basic.params
        self._a0 = {s: np.moveaxis(assemble_A0_dense(basic.field(s), params).diagonal(axis1=-2, axis2=-1), -1, 0)
                    for s in SIDES}
        self._speeds = {s: [local_speeds(basic, s, i) for i in range(1, basic.dim + 1)] for s in SIDES}
        self._front_speeds = [np.abs(v) for v in basic.v_tan_plus]
        self.closure = boundary_closure(basic)
        self._lift: Optional[Tuple[float, BoundaryLift]] = None

        self.dt_max = _cfl_step(self.grid, self._speeds)
        self.dt = self.dt_max
        if dt is not None:
            self.set_dt(dt)
        logger.info(
            f"Linear solver ready: dt_max={self.dt_max:.4e}, "
            f"{'spectral' if self.spectral else 'central'} tangential, "
            f"{'homogenized' if self.homogenized else 'direct'} boundary data"
        )

    def set_dt(self, dt: float) -> None:
        if dt > self.dt_max * (1.0 + 1e-12):
            raise CFLViolation(f"dt={dt:.6e} exceeds the CFL bound {self.dt_max:.6e}")
        self.dt = float(dt)

    # Data

    def boundary_lift(self, t: float) -> BoundaryLift:
        if self._lift is None or self._lift[0] != t:
            src = self.sources
            lift = lift_boundary_source(src.boundary_at(t), self.basic, src.interior_at(t),
                                        src.boundary_at(t, derivative=True))
            self._lift = (t, lift)
        return self._lift[1]

    def forcing(self, t: float):
        """Interior forcing and boundary data the discrete system is driven by."""
        if self.homogenized:
            lift = self.boundary_lift(t)
            g = np.zeros((2 * self.basic.dim + 1,) + self.grid.boundary_shape)
            return (lift.f_minus, lift.f_plus), g
        return self.sources.interior_at(t), self.sources.boundary_at(t)

    def physical(self, state: LinearField) -> LinearField:
        """The solution V' = V'_solved + V_nat (identity on the direct path)."""
        if not self.homogenized:
            return state
        lift = self.boundary_lift(state.t)
        return LinearField(state.minus + lift.minus, state.plus + lift.plus, state.psi, state.t)

    # Semi-discretization

    def _dissipation(self, V: np.ndarray, sign: int) -> np.ndarray:
        grid = self.grid
        speeds = self._speeds[sign]
        out = llf_dissipation(V, speeds[0], grid.axis(1), grid.h1, periodic=False)
        if not self.spectral:
            for i in range(2, grid.dim + 1):
                out = out + llf_dissipation(V, speeds[i - 1], grid.axis(i), grid.h_tan, periodic=True)
        return out

    def rhs(self, state: LinearField, t: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(d_t V'-, d_t V'+, d_t psi) at time t."""
        basic = self.basic
        st = basic.stencils
        f, g = self.forcing(t)
        out = []
        for k, s in enumerate(SIDES):
            V = state.side(s)
            dV = (f[k] - apply_Lprime_e(V, basic, s)) / self._a0[s]
            out.append(dV + self._dissipation(V, s))
        row0 = apply_Bprime_e(st.trace(state.minus), st.trace(state.plus), state.psi, basic)[0]
        dpsi = g[0] - row0
        if not self.spectral:
            for i in range(2, self.grid.dim + 1):
                dpsi = dpsi + llf_dissipation(state.psi, self._front_speeds[i - 2], self.grid.axis(i),
                                              self.grid.h_tan, periodic=True)
        return out[0], out[1], dpsi

    def impose_boundary(self, state: LinearField) -> None:
        """Correct incoming amplitudes at x_1 = 0 and extrapolate at x_1 = x_max, in place."""
        basic = self.basic
        st = basic.stencils
        d = basic.dim
        _, g = self.forcing(state.t)
        rows = apply_Bprime_e(st.trace(state.minus), st.trace(state.plus), state.psi, basic)[1:] - g[1:]
        rhs = np.moveaxis(rows, 0, -1)[..., None]
        amplitudes = -np.moveaxis((self.closure.inverse @ rhs)[..., 0], -1, 0)
        for k, s in enumerate(SIDES):
            V = state.side(s)
            a = amplitudes[k * d:(k + 1) * d]
            V[:, 0] += np.sum(a[:, None] * self.closure.modes[k], axis=0)
            V[:, -1] = V[:, -2]

    def _filter(self, state: LinearField) -> LinearField:
        grid = self.grid
        axes = [grid.axis(i) for i in range(2, grid.dim + 1)]
        return LinearField(spectral_filter(state.minus, grid, axes), spectral_filter(state.plus, grid, axes),
                           spectral_filter(state.psi, grid, axes), state.t)

    def step(self, state: LinearField, index: int = 0) -> LinearField:
        """Advance by one SSP RK2 step.

        Raises:
            NaNDetected: If the new state is not finite
        """
        t, dt = state.t, self.dt
        k1 = self.rhs(state, t)
        stage = LinearField(state.minus + dt * k1[0], state.plus + dt * k1[1], state.psi + dt * k1[2], t + dt)
        self.impose_boundary(stage)
        k2 = self.rhs(stage, t + dt)
        new = LinearField(0.5 * (state.minus + stage.minus + dt * k2[0]),
                          0.5 * (state.plus + stage.plus + dt * k2[1]),
                          0.5 * (state.psi + stage.psi + dt * k2[2]), t + dt)
        if self.spectral:
            new = self._filter(new)
        self.impose_boundary(new)
        if not new.is_finite():
            raise NaNDetected(f"non-finite solution at t={new.t:.6g}", step=index)
        return new


@dataclass
class RunResult:
    """Outcome of :func:`run`.

    Attributes:
        ledger: Energy ledger of the run
        final_state: Physical state at the final time
        steps: Number of time steps
        dt: Time step used
        snapshots: Written snapshot files
    """
    ledger: EnergyLedger
    final_state: LinearField
    steps: int
    dt: float
    snapshots: List[Path] = field(default_factory=list)

    def summary(self) -> Dict:
        out = {"steps": self.steps, "dt": self.dt, "t_final": self.final_state.t,
               "rows": len(self.ledger.rows)}
        out.update({f"spacetime_{k}": v for k, v in self.ledger.spacetime_norms().items()})
        return out


def run(
    basic: BasicState,
    sources: SourceModel,
    final_time: float,
    s: int = 1,
    record_interval: int = 10,
    homogenized: bool = False,
    snapshot_dir: Optional[Union[str, Path]] = None,
    track_boundary: bool = True,
    initial: Optional[LinearField] = None,
    steps: Optional[int] = None,
) -> RunResult:
    """Integrate from ``initial`` (zero data by default) to ``final_time`` and keep the ledger.

    The step is the CFL step shrunk so that an integer number of steps lands
    on ``final_time``; the last step is always recorded.

    Args:
        basic: Basic state
        sources: Source model on the same grid
        final_time: T > 0
        s: Norm order of the ledger
        record_interval: Steps between ledger rows
        homogenized: Solve with the lifted boundary data
        snapshot_dir: Write final-state snapshots there when given
        track_boundary: Keep boundary traces for cancellation checks
        initial: Good-unknown state at t = 0; the ledger history before t = 0 stays zero
        steps: Number of steps; defaults to the fewest the CFL bound allows

    Returns:
        RunResult

    Raises:
        ConfigurationError: If ``steps`` is < 1
        CFLViolation: If ``steps`` is too small for the CFL bound
    """
    from app.services.exporters.results_exporter import ResultsExporter

    solver = LinearSolver(basic, sources, homogenized)
    if steps is None:
        n_steps = max(1, math.ceil(final_time / solver.dt_max - 1e-12))
    elif steps < 1:
        raise ConfigurationError(f"steps must be >= 1, got {steps}")
    else:
        n_steps = int(steps)
    solver.set_dt(final_time / n_steps)
    ledger = EnergyLedger(basic, s, solver.dt, record_interval, track_boundary)

    if initial is None:
        state = LinearField.zeros(basic)
    else:
        state = LinearField(initial.minus.copy(), initial.plus.copy(), initial.psi.copy(), 0.0)
    ledger.observe(0, solver.physical(state), sources.interior_at(0.0), sources.boundary_at(0.0))
    for k in range(1, n_steps + 1):
        state = solver.step(state, k)
        t = k * solver.dt
        state.t = t
        physical = solver.physical(state)
        row = ledger.observe(k, physical, sources.interior_at(t), sources.boundary_at(t))
        if row is None and k == n_steps:
            ledger.record(k, physical, physical.as_W(basic), sources.boundary_at(t))
    final = solver.physical(state)
    logger.info(f"Run finished: {n_steps} steps of dt={solver.dt:.4e}, {len(ledger.rows)} ledger rows")

    snapshots: List[Path] = []
    if snapshot_dir is not None:
        exporter = ResultsExporter()
        out = Path(snapshot_dir)
        snapshots.append(exporter.export_snapshot(final.minus, out / "final_minus", final.t, side=-1))
        snapshots.append(exporter.export_snapshot(final.plus, out / "final_plus", final.t, side=+1))
        snapshots.append(exporter.export_snapshot(final.psi, out / "final_psi", final.t))
    return RunResult(ledger, final, n_steps, solver.dt, snapshots)
