"""Run configuration sections and YAML round trip."""

from app.config.settings import (
    SUBCOMMANDS,
    BackgroundConfig,
    BasicStateConfig,
    BoundarySourceConfig,
    GridConfig,
    MaterialConfig,
    OutputConfig,
    ProbeConfig,
    RunConfig,
    SolverConfig,
    SourceConfig,
)

__all__ = [
    "SUBCOMMANDS",
    "BackgroundConfig",
    "BasicStateConfig",
    "BoundarySourceConfig",
    "GridConfig",
    "MaterialConfig",
    "OutputConfig",
    "ProbeConfig",
    "RunConfig",
    "SolverConfig",
    "SourceConfig",
]
