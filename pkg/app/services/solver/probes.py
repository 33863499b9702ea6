"""Numerical property probes: trace inequalities and tame-estimate ratios.

Trace probe, on random band-limited fields u, u1, u2 of the half-space:

    sum_xi' (1 + 4 pi^2 |xi'|^2)^{1/2} |w^(xi')|^2 <= ||u||_{H^1}^2,   w = u(0, .)
    |int u1 d_j u2(0, .)| <= ||u1||_{H^1} ||u2||_{H^1}

each checked with the slack factor 1 + 10 h. Tame probe: the ratio of
solution to source norms over a grid family, and over a family of
backgrounds whose F11 jump shrinks.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from app.core.errors import ConfigurationError
from app.models.grid import Grid
from app.services.linearized.basic_state import BasicState
from app.services.solver.integrator import run
from app.services.solver.norms import boundary_fractional_norm, sobolev_norm
from app.services.solver.sources import SourceModel
from app.services.straightening.stencils import Stencils, TangentialScheme
from app.utils.helpers import pairwise_sum

logger = logging.getLogger(__name__)

SLACK_FACTOR = 10.0
PLATEAU_TOL = 0.2
UNIFORM_BAND = 3.0


# ---------------------------------------------------------------------------
# Trace inequalities
# ---------------------------------------------------------------------------

@dataclass
class TraceProbeReport:
    """Outcome of the trace-inequality probe.

    Attributes:
        samples: Number of random fields
        slack: Factor 1 + 10 h applied to every right-hand side
        violations_trace: Samples violating the trace inequality
        violations_pairing: Samples violating the boundary pairing bound
        max_ratio_trace: Largest lhs/rhs of the trace inequality
        max_ratio_pairing: Largest lhs/rhs of the pairing bound
        gaussian_ratio: lhs/rhs of the trace inequality for a Gaussian bump
    """
    samples: int
    slack: float
    violations_trace: int = 0
    violations_pairing: int = 0
    max_ratio_trace: float = 0.0
    max_ratio_pairing: float = 0.0
    gaussian_ratio: float = float("nan")

    @property
    def passed(self) -> bool:
        return self.violations_trace == 0 and self.violations_pairing == 0

    def to_dict(self) -> Dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def band_limited_field(grid: Grid, rng: np.random.Generator, bandwidth: int = 3) -> np.ndarray:
    """Random field sum_k c_k exp(-(x_1/sigma_k)^2) e^{2 pi i k.x'} (real part), shape (1, *grid)."""
    coords = grid.coordinates()
    x1 = coords[0]
    u = np.zeros(grid.shape)
    modes = range(-bandwidth, bandwidth + 1)
    for k in np.ndindex(*([len(modes)] * (grid.dim - 1))):
        wave = [modes[j] for j in k]
        phase = 2.0 * np.pi * sum(w * x for w, x in zip(wave, coords[1:]))
        sigma = rng.uniform(0.5, 2.0)
        a, b = rng.normal(size=2)
        u += np.exp(-(x1 / sigma) ** 2) * (a * np.cos(phase) + b * np.sin(phase))
    return u[None]


def _trace_sides(u: np.ndarray, st: Stencils):
    lhs = boundary_fractional_norm(st.trace(u), st.grid, 0.5) ** 2
    rhs = sobolev_norm(u, st, 1) ** 2
    return lhs, rhs


def _pairing_sides(u1: np.ndarray, u2: np.ndarray, st: Stencils, j: int):
    w1, w2 = st.trace(u1)[0], st.trace(u2)[0]
    lhs = abs(pairwise_sum(st.grid.boundary_weight() * w1 * st.dtan(w2, j)))
    rhs = sobolev_norm(u1, st, 1) * sobolev_norm(u2, st, 1)
    return lhs, rhs


def gaussian_bump(grid: Grid, width: float = 0.15) -> np.ndarray:
    """exp(-x_1^2) times a periodic Gaussian centered at x' = 1/2, shape (1, *grid)."""
    coords = grid.coordinates()
    profile = np.exp(-coords[0] ** 2)
    for x in coords[1:]:
        profile = profile * np.exp(-(np.sin(np.pi * (x - 0.5)) / width) ** 2)
    return profile[None]


def trace_inequality_probe(grid: Grid, samples: int = 200, seed: int = 0, bandwidth: int = 3) -> TraceProbeReport:
    """Check both trace inequalities on ``samples`` random band-limited fields.

    Tangential derivatives are spectral, so band-limited fields are
    differentiated exactly in x'.

    Args:
        grid: Grid of the truncated half-space
        samples: Number of random samples
        seed: RNG seed
        bandwidth: Largest tangential wavenumber per direction (below n_tan / 2)

    Returns:
        TraceProbeReport

    Raises:
        ConfigurationError: If the bandwidth is not resolved by the grid
    """
    if not 0 <= bandwidth < grid.n_tan // 2:
        raise ConfigurationError(f"bandwidth {bandwidth} must lie in [0, {grid.n_tan // 2})")
    st = Stencils(grid, TangentialScheme.SPECTRAL)
    slack = 1.0 + SLACK_FACTOR * max(grid.h1, grid.h_tan)
    rng = np.random.default_rng(seed)
    report = TraceProbeReport(samples=samples, slack=slack)
    for _ in range(samples):
        u1 = band_limited_field(grid, rng, bandwidth)
        u2 = band_limited_field(grid, rng, bandwidth)
        lhs, rhs = _trace_sides(u1, st)
        ratio = lhs / rhs if rhs > 0.0 else 0.0
        report.max_ratio_trace = max(report.max_ratio_trace, ratio)
        if lhs > rhs * slack:
            report.violations_trace += 1
        for j in range(2, grid.dim + 1):
            lhs, rhs = _pairing_sides(u1, u2, st, j)
            ratio = lhs / rhs if rhs > 0.0 else 0.0
            report.max_ratio_pairing = max(report.max_ratio_pairing, ratio)
            if lhs > rhs * slack:
                report.violations_pairing += 1
    lhs, rhs = _trace_sides(gaussian_bump(grid), st)
    report.gaussian_ratio = lhs / rhs
    logger.info(
        f"Trace probe: {samples} samples, {report.violations_trace} + {report.violations_pairing} violations, "
        f"max ratios {report.max_ratio_trace:.4f} / {report.max_ratio_pairing:.4f}"
    )
    return report


# ---------------------------------------------------------------------------
# Tame-estimate ratios
# ---------------------------------------------------------------------------

@dataclass
class TameProbeReport:
    """Ratios of solution to source norms over a family of runs.

    Attributes:
        s: Norm order (1, or 3 for perturbed basic states)
        labels: One label per run (grid size or jump fraction)
        ratios: One ratio per run
        norms: Space-time norms per run
        plateau: Last two ratios within 20% (grid family)
        band: max/min of the ratios
        skipped: True when every source vanishes
    """
    s: int
    labels: List[str] = field(default_factory=list)
    ratios: List[float] = field(default_factory=list)
    norms: List[Dict[str, float]] = field(default_factory=list)
    plateau: Optional[bool] = None
    band: Optional[float] = None
    skipped: bool = False

    def to_dict(self) -> Dict:
        return asdict(self)


def tame_ratio(norms: Dict[str, float], s: int = 1, K: float = 0.0) -> float:
    """Solution over source norms; for s = 3 the source side carries the factor 1 + K.

    Example:
        >>> tame_ratio({"V": 1.0, "psi": 1.0, "f": 2.0, "g": 2.0})
        0.5
    """
    source = norms["f"] + norms["g"]
    if s >= 3:
        source *= 1.0 + K
    return (norms["V"] + norms["psi"]) / source


def _probe_runs(
    label_basics: Sequence[tuple],
    source_factory: Callable[[Grid], SourceModel],
    final_time: float,
    s: int,
    homogenized: bool,
) -> TameProbeReport:
    report = TameProbeReport(s=s)
    for label, basic in label_basics:
        sources = source_factory(basic.grid)
        if sources.is_zero:
            logger.warning("Tame probe skipped: all sources vanish")
            report.skipped = True
            return report
        result = run(basic, sources, final_time, s=s, record_interval=10 ** 9,
                     homogenized=homogenized, track_boundary=False)
        norms = result.ledger.spacetime_norms(s)
        ratio = tame_ratio(norms, s, basic.K if s >= 3 else 0.0)
        report.labels.append(str(label))
        report.ratios.append(ratio)
        report.norms.append(norms)
        logger.info(f"Tame probe run {label}: ratio {ratio:.6g}")
    if report.ratios:
        report.band = max(report.ratios) / min(report.ratios) if min(report.ratios) > 0.0 else float("inf")
    return report


def tame_estimate_probe(
    basic_factory: Callable[[Grid], BasicState],
    source_factory: Callable[[Grid], SourceModel],
    grids: Sequence[Grid],
    final_time: float,
    s: int = 1,
    homogenized: bool = False,
) -> TameProbeReport:
    """Ratio of solution to source norms on each grid of a refinement family.

    Args:
        basic_factory: Builds the basic state on a grid
        source_factory: Builds the sources on a grid
        grids: Grid family, coarse to fine
        final_time: T
        s: 1, or 3 with the 1 + K factor on the sources
        homogenized: Solve with lifted boundary data

    Returns:
        TameProbeReport with the plateau verdict (last two ratios within 20%)

    Raises:
        ConfigurationError: If s is not 1 or 3, or the family is empty
    """
    if s not in (1, 3):
        raise ConfigurationError(f"tame probe supports s in {{1, 3}}, got {s}")
    if not grids:
        raise ConfigurationError("tame probe needs at least one grid")
    runs = [(grid.n1, basic_factory(grid)) for grid in grids]
    report = _probe_runs(runs, source_factory, final_time, s, homogenized)
    if len(report.ratios) >= 2:
        a, b = report.ratios[-2:]
        report.plateau = abs(a - b) <= PLATEAU_TOL * max(abs(a), abs(b))
    return report


def jump_family_probe(
    basic_factory: Callable[[float, Grid], BasicState],
    source_factory: Callable[[Grid], SourceModel],
    grid: Grid,
    fractions: Sequence[float],
    final_time: float,
    homogenized: bool = False,
) -> TameProbeReport:
    """Ratios for backgrounds with [F11] = fraction * F11+, on one grid.

    The family counts as uniformly bounded when max/min <= 3 (``band``).
    """
    runs = [(fraction, basic_factory(fraction, grid)) for fraction in fractions]
    report = _probe_runs(runs, source_factory, final_time, 1, homogenized)
    if report.band is not None:
        logger.info(f"Jump family band max/min = {report.band:.4g} (uniform if <= {UNIFORM_BAND})")
    return report
