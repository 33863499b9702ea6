"""Classification sweeps of the stability condition over stretch ratios."""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import yaml

from app.core.errors import ConfigurationError
from app.services.stability.condition import StabilityVerdict, Stretches, evaluate_stretches

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "dim", "f11m_over_f11p", "f22_over_f11p", "f33_over_f11p",
    "lhs", "rhs", "margin", "satisfied", "on_boundary",
]

_RANGE_KEYS = {"start", "stop", "num"}
_SPEC_KEYS = {"dim", "f11m_over_f11p", "f22_over_f11p", "f33_over_f11p"}


def _axis(name: str, value) -> np.ndarray:
    if isinstance(value, (int, float)):
        values = np.array([float(value)])
    elif isinstance(value, dict):
        unknown = set(value) - _RANGE_KEYS
        if unknown or not _RANGE_KEYS <= set(value):
            raise ConfigurationError(f"sweep range {name} needs exactly start, stop, num; got {sorted(value)}")
        values = np.linspace(float(value["start"]), float(value["stop"]), int(value["num"]))
    elif isinstance(value, (list, tuple)):
        values = np.array([float(v) for v in value])
    else:
        raise ConfigurationError(f"cannot read sweep range {name}={value!r}")
    if values.size == 0 or np.any(values <= 0.0):
        raise ConfigurationError(f"sweep range {name} must be nonempty and positive")
    return np.unique(values)


@dataclass
class SweepSpec:
    """Ratios to F11+ swept on a tensor grid (F11+ = 1).

    Attributes:
        dim: Space dimension
        f11m: Values of F11-/F11+, each < 1
        f22: Values of F22/F11+
        f33: Values of F33/F11+ (d = 3)
    """
    dim: int
    f11m: np.ndarray
    f22: np.ndarray
    f33: np.ndarray = field(default_factory=lambda: np.array([np.nan]))

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigurationError(f"dim must be 2 or 3, got {self.dim}")
        if np.any(self.f11m >= 1.0):
            raise ConfigurationError("sweep needs F11- < F11+ (ratios below 1)")

    @classmethod
    def from_dict(cls, data: Dict) -> "SweepSpec":
        unknown = set(data) - _SPEC_KEYS
        if unknown:
            raise ConfigurationError(f"unknown sweep keys: {sorted(unknown)}")
        dim = int(data.get("dim", 2))
        try:
            f33 = _axis("f33_over_f11p", data["f33_over_f11p"]) if dim == 3 else np.array([np.nan])
            return cls(dim, _axis("f11m_over_f11p", data["f11m_over_f11p"]),
                       _axis("f22_over_f11p", data["f22_over_f11p"]), f33)
        except KeyError as exc:
            raise ConfigurationError(f"sweep spec misses {exc.args[0]}") from exc

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "SweepSpec":
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        return cls.from_dict(data)

    def points(self) -> List[Tuple[float, float, float]]:
        """Lexicographic (f11m, f22, f33) points."""
        return list(itertools.product(self.f11m.tolist(), self.f22.tolist(), self.f33.tolist()))


@dataclass
class SweepRow:
    f11m: float
    f22: float
    f33: float
    verdict: StabilityVerdict

    def to_row(self) -> List:
        v = self.verdict
        f33 = "" if np.isnan(self.f33) else repr(self.f33)
        return [v.dim, repr(self.f11m), repr(self.f22), f33, repr(v.lhs), repr(v.rhs),
                repr(v.margin), str(v.satisfied).lower(), str(v.on_boundary).lower()]


def _evaluate_point(dim: int, point: Sequence[float]) -> SweepRow:
    f11m, f22, f33 = point
    st = Stretches(dim, 1.0, f11m, f22, None if dim == 2 else f33)
    return SweepRow(f11m, f22, f33, evaluate_stretches(st))


def sweep(spec: SweepSpec, threads: int = 1) -> List[SweepRow]:
    """Evaluate the condition on every grid point, in lexicographic order.

    Args:
        spec: Sweep ranges
        threads: Worker threads (the row order does not depend on it)

    Returns:
        One SweepRow per point
    """
    points = spec.points()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda p: _evaluate_point(spec.dim, p), points))
    else:
        rows = [_evaluate_point(spec.dim, p) for p in points]
    n_sat = sum(r.verdict.satisfied for r in rows)
    logger.info(f"Sweep over {len(rows)} points: {n_sat} satisfied")
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], output_path: Union[str, Path]) -> Path:
    """Write the classification table with the fixed column set."""
    from app.services.exporters.results_exporter import ResultsExporter

    return ResultsExporter.export_table_to_csv(SWEEP_COLUMNS, [row.to_row() for row in rows], output_path)
