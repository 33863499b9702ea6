"""Energy ledger: time series of discrete norms, energies and residuals of a run.

Every observed step feeds the histories (zero levels are prefilled at negative
times because the solution vanishes in the past) and the space-time sums;
every ``record_interval`` steps one row with the fixed columns is appended.
"""

from __future__ import annotations

import itertools
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.errors import ConfigurationError
from app.models.history import TraceHistory
from app.services.hyperbolic.assembly import assemble_A0_dense
from app.services.hyperbolic.calA import transform_J
from app.services.linearized.auxiliary import auxiliary_eval
from app.services.linearized.basic_state import BasicState
from app.services.linearized.cancellation import BoundaryHistory
from app.services.linearized.operators import from_good_unknowns
from app.services.linearized.wvars import LinearField, boundary_conditions_W
from app.services.solver.norms import boundary_fractional_norm, instant_norm, sobolev_norm
from app.services.straightening.involutions import linearized_residual_norms
from app.utils.helpers import pairwise_sum

logger = logging.getLogger(__name__)

Pair = Tuple[np.ndarray, np.ndarray]

SIDES = (-1, +1)


def energy_multi_indices(dim: int, s: int) -> List[Tuple[int, ...]]:
    """beta = (beta_t, beta_2[, beta_3]) with |beta| <= s, ordered by |beta|.

    Example:
        >>> energy_multi_indices(2, 1)
        [(0, 0), (1, 0), (0, 1)]
    """
    betas = [b for b in itertools.product(range(s + 1), repeat=dim) if sum(b) <= s]
    return sorted(betas, key=lambda b: (sum(b), tuple(-x for x in b)))


def energy_column(beta: Sequence[int]) -> str:
    return "E_tan_b" + "".join(str(b) for b in beta)


def ledger_columns(dim: int, s: int) -> List[str]:
    """Fixed column order of the ledger CSV."""
    cols = ["t", "step"]
    cols += [f"norm_full_{m}" for m in range(s + 1)]
    cols += [f"norm_tan_{m}" for m in range(s + 1)]
    cols += [energy_column(b) for b in energy_multi_indices(dim, s)]
    cols += ["E_tan_check", "spacetime_H1", "psi_L2", "source_f_H1", "source_g_L2",
             "front_residual", "bc_residual", "inv_rho", "inv1", "inv2",
             "aux_varsigma", "aux_eta", "aux_zeta"]
    return cols


def tangential_energy(DW: Pair, basic: BasicState) -> float:
    """sum_+- int A0(U_bar) J_bar DW . J_bar DW, with J_bar the background W-map."""
    params = basic.params
    bg = basic.background
    weights = basic.grid.cell_weights()
    total = 0.0
    for k, s in enumerate(SIDES):
        r = np.asarray(bg.rho(s) * bg.F(s)[0, 0])
        J = transform_J(r, np.zeros(basic.dim - 1), basic.dim)
        A0 = assemble_A0_dense(bg.vector(s), params)
        V = np.einsum("ij,j...->i...", J, DW[k])
        total += pairwise_sum(weights * np.einsum("ij,i...,j...->...", A0, V, V))
    return total


def tangential_energy_expanded(DW: Pair, basic: BasicState) -> float:
    """Weighted sum of squares form of the same energy.

    sum_+- { |W_p|^2/(rho c^2) + a_1 |W_p - W_F11|^2/(rho F11^2) + sum_j w_j |W_j|^2 + |W_S|^2 },
    j over the velocity and F entries other than F11 with w_j = rho (velocity)
    or rho a_k (column k of F), all at the background.
    """
    lay = basic.layout
    bg = basic.background
    weights = basic.grid.cell_weights()
    f11 = lay.F(0, 0)
    a = np.asarray(basic.params.elastic, dtype=float)
    others = [j for j in range(lay.v(0), lay.s) if j != f11]
    column = np.array([1.0 if j < lay.F(0, 0) else a[(j - lay.F(0, 0)) // basic.dim] for j in others])
    total = 0.0
    for k, s in enumerate(SIDES):
        W = DW[k]
        rho = bg.rho(s)
        c2 = bg.sound_speed_sq(s)
        F11 = bg.F(s)[0, 0]
        density = (W[lay.p] ** 2 / (rho * c2)
                   + a[0] * (W[lay.p] - W[f11]) ** 2 / (rho * F11 ** 2)
                   + rho * np.einsum("j,j...->...", column, W[others] ** 2)
                   + W[lay.s] ** 2)
        total += pairwise_sum(weights * density)
    return total


def _relative_gap(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


class EnergyLedger:
    """Per-step bookkeeping of a linear run.

    Args:
        basic: Basic state of the run
        s: Norm order
        dt: Time step
        record_interval: Steps between recorded rows
        track_boundary: Keep a BoundaryHistory for cancellation checks
    """

    def __init__(self, basic: BasicState, s: int, dt: float, record_interval: int = 10,
                 track_boundary: bool = True):
        self.basic = basic
        self.s = s
        self.dt = dt
        self.record_interval = max(1, int(record_interval))
        self.betas = energy_multi_indices(basic.dim, s)
        self.columns = ledger_columns(basic.dim, s)
        self.rows: List[Dict[str, float]] = []

        depth = s + 2
        self.W_history = {sign: TraceHistory(depth, dt) for sign in SIDES}
        self.V_history = {sign: TraceHistory(depth, dt) for sign in SIDES}
        self.f_history = {sign: TraceHistory(depth, dt) for sign in SIDES}
        self.psi_history = TraceHistory(3, dt)
        self.boundary = BoundaryHistory(s + 3, dt) if track_boundary else None
        self._psi_series: List[np.ndarray] = []
        self._g_series: List[np.ndarray] = []
        self.spacetime_orders = sorted({1, s})
        self._sums = {m: [0.0, 0.0] for m in self.spacetime_orders}
        self._last_step: Optional[int] = None
        self._prefill(depth)

    def _prefill(self, depth: int) -> None:
        shape = self.basic.U_plus.shape
        bshape = self.basic.grid.boundary_shape
        zero = np.zeros(shape)
        for level in range(depth - 1, 0, -1):
            t = -level * self.dt
            for sign in SIDES:
                self.W_history[sign].append(t, zero)
                self.V_history[sign].append(t, zero)
                self.f_history[sign].append(t, zero)
            if level <= 2:
                self.psi_history.append(t, np.zeros(bshape))
        if self.boundary is not None:
            empty = LinearField(zero, zero, np.zeros(bshape))
            for level in range(self.boundary.W_minus.depth - 1, 0, -1):
                empty.t = -level * self.dt
                self.boundary.record(empty, self.basic)

    # Observation

    def observe(self, step: int, state: LinearField, f: Pair, g: np.ndarray) -> Optional[Dict[str, float]]:
        """Feed one step; returns the recorded row on record steps.

        Args:
            step: Step index (0 for the initial state)
            state: Physical V' and psi at this step (GOOD representation)
            f: Interior sources (f-, f+) at this time
            g: Boundary source at this time
        """
        basic = self.basic
        st = basic.stencils
        t = state.t
        W = state.as_W(basic)
        for k, sign in enumerate(SIDES):
            self.W_history[sign].append(t, W.side(sign))
            self.V_history[sign].append(t, state.side(sign))
            self.f_history[sign].append(t, f[k])
        self.psi_history.append(t, state.psi)
        if self.boundary is not None:
            self.boundary.record(state, basic, g, f)
        self._psi_series.append(np.array(state.psi, dtype=float))
        self._g_series.append(np.array(g, dtype=float))

        for m, sums in self._sums.items():
            sums[0] += self.dt * sum(instant_norm(self.V_history[s], st, m) ** 2 for s in SIDES)
            sums[1] += self.dt * sum(instant_norm(self.f_history[s], st, m) ** 2 for s in SIDES)
        self._last_step = step

        if step % self.record_interval:
            return None
        return self.record(step, state, W, g)

    def record(self, step: int, state: LinearField, W: LinearField, g: np.ndarray) -> Dict[str, float]:
        """Append one row from the current histories."""
        basic = self.basic
        st = basic.stencils
        row: Dict[str, float] = {"t": float(state.t), "step": int(step)}
        for m in range(self.s + 1):
            row[f"norm_full_{m}"] = float(np.sqrt(sum(
                instant_norm(self.W_history[s], st, m) ** 2 for s in SIDES)))
        for m in range(self.s + 1):
            row[f"norm_tan_{m}"] = float(np.sqrt(sum(
                instant_norm(self.W_history[s], st, m, tangential=True) ** 2 for s in SIDES)))

        worst_gap = 0.0
        for beta in self.betas:
            DW = tuple(self._tangential_derivative(self.W_history[s], beta) for s in SIDES)
            energy = tangential_energy(DW, basic)
            worst_gap = max(worst_gap, _relative_gap(energy, tangential_energy_expanded(DW, basic)))
            row[energy_column(beta)] = energy
        row["E_tan_check"] = worst_gap

        row["spacetime_H1"] = float(np.sqrt(self._sums[1][0]))
        row["psi_L2"] = sobolev_norm(state.psi[None], st, 0, boundary=True)
        row["source_f_H1"] = float(np.sqrt(self._sums[1][1]))
        row["source_g_L2"] = sobolev_norm(g, st, 0, boundary=True)

        bc = boundary_conditions_W(st.trace(W.minus), st.trace(W.plus), state.psi, basic, g,
                                   dt_psi=self.psi_history.derivative(1))
        row["front_residual"] = float(np.max(np.abs(bc[0])))
        row["bc_residual"] = float(np.max(np.abs(bc[1:])))

        V_m, V_p = from_good_unknowns((state.minus, state.plus), state.psi, basic)
        inv = linearized_residual_norms(basic.U_minus, basic.U_plus, V_m, V_p,
                                        basic.lift_minus, basic.lift_plus, state.psi, basic.params)
        row["inv_rho"] = inv["rho"]
        row["inv1"] = inv["inv1"]
        row["inv2"] = inv["inv2"]

        aux = auxiliary_eval((W.minus, W.plus), state.psi, basic)
        row.update(aux.norms(basic.grid.cell_weights()))

        self.rows.append(row)
        logger.debug(f"Ledger row at t={state.t:.6g}: E_tan={row[energy_column(self.betas[0])]:.6e}")
        return row

    def _tangential_derivative(self, history: TraceHistory, beta: Sequence[int]) -> np.ndarray:
        out = history.derivative(beta[0])
        for j, order in enumerate(beta[1:], start=2):
            for _ in range(order):
                out = self.basic.stencils.dtan(out, j)
        return out

    # Summaries

    @property
    def last_step(self) -> Optional[int]:
        return self._last_step

    def psi_series(self) -> np.ndarray:
        return np.stack(self._psi_series)

    def g_series(self) -> np.ndarray:
        return np.stack(self._g_series)

    def spacetime_norms(self, order: int = 1) -> Dict[str, float]:
        """Norms over the whole window: V' and f in H^m, psi and g in H^{m+1/2}.

        Args:
            order: m, one of ``spacetime_orders``

        Raises:
            ConfigurationError: If the order was not accumulated
        """
        if order not in self._sums:
            raise ConfigurationError(f"space-time order {order} not tracked; have {self.spacetime_orders}")
        grid = self.basic.grid
        V_sum, f_sum = self._sums[order]
        return {
            "V": float(np.sqrt(V_sum)),
            "psi": boundary_fractional_norm(self.psi_series(), grid, order + 0.5, self.dt),
            "f": float(np.sqrt(f_sum)),
            "g": boundary_fractional_norm(self.g_series(), grid, order + 0.5, self.dt),
        }

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows])

    def table(self) -> List[List]:
        """Rows as lists in column order."""
        return [[row[c] for c in self.columns] for row in self.rows]

    def to_csv(self, path: Union[str, Path]) -> Path:
        from app.services.exporters.results_exporter import ResultsExporter
        return ResultsExporter().export_ledger_to_csv(self, path)
