"""Stability condition on contact backgrounds and classification sweeps."""

from app.services.stability.condition import (
    NOT_SATISFIED,
    SATISFIED,
    StabilityVerdict,
    Stretches,
    Surd,
    estimate_constants,
    evaluate_condition,
    evaluate_stretches,
    exact_constants,
    exact_product_identity,
    exact_rearranged_2d,
    exact_satisfied,
)
from app.services.stability.sweep import SWEEP_COLUMNS, SweepRow, SweepSpec, sweep, write_sweep_csv

__all__ = [
    "NOT_SATISFIED",
    "SATISFIED",
    "StabilityVerdict",
    "Stretches",
    "Surd",
    "estimate_constants",
    "evaluate_condition",
    "evaluate_stretches",
    "exact_constants",
    "exact_product_identity",
    "exact_rearranged_2d",
    "exact_satisfied",
    "SWEEP_COLUMNS",
    "SweepRow",
    "SweepSpec",
    "sweep",
    "write_sweep_csv",
]
