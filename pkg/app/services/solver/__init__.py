"""Time integration of the effective linear problem, discrete norms, ledger and probes."""

from app.services.solver.integrator import (
    BoundaryClosure,
    LinearSolver,
    RunResult,
    boundary_closure,
    cfl_step,
    doubling_steps,
    incoming_modes,
    llf_dissipation,
    local_speeds,
    run,
    spectral_filter,
)
from app.services.solver.ledger import (
    EnergyLedger,
    energy_multi_indices,
    ledger_columns,
    tangential_energy,
    tangential_energy_expanded,
)
from app.services.solver.norms import (
    NormKind,
    boundary_fractional_norm,
    discrete_norms,
    extend_time_series,
    instant_norm,
    reflection_coefficients,
    sobolev_norm,
    spatial_multi_indices,
)
from app.services.solver.probes import (
    TameProbeReport,
    TraceProbeReport,
    jump_family_probe,
    tame_estimate_probe,
    tame_ratio,
    trace_inequality_probe,
)
from app.services.solver.sources import BoundaryBump, InteriorBump, SourceModel, time_bump, time_bump_derivative

__all__ = [
    "BoundaryClosure",
    "LinearSolver",
    "RunResult",
    "boundary_closure",
    "cfl_step",
    "doubling_steps",
    "incoming_modes",
    "llf_dissipation",
    "local_speeds",
    "run",
    "spectral_filter",
    "EnergyLedger",
    "energy_multi_indices",
    "ledger_columns",
    "tangential_energy",
    "tangential_energy_expanded",
    "NormKind",
    "boundary_fractional_norm",
    "discrete_norms",
    "extend_time_series",
    "instant_norm",
    "reflection_coefficients",
    "sobolev_norm",
    "spatial_multi_indices",
    "TameProbeReport",
    "TraceProbeReport",
    "jump_family_probe",
    "tame_estimate_probe",
    "tame_ratio",
    "trace_inequality_probe",
    "BoundaryBump",
    "InteriorBump",
    "SourceModel",
    "time_bump",
    "time_bump_derivative",
]
