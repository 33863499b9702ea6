"""Core infrastructure: exception hierarchy and logging setup."""

from app.core.errors import (
    BoundarySolveSingular,
    CFLViolation,
    ConfigurationError,
    ConstraintViolated,
    DegenerateF1N,
    DegenerateLift,
    InsufficientHistory,
    InvalidDensity,
    MassFluxNonzero,
    MultiplicityMismatch,
    NaNDetected,
    NegativeTargetPressure,
    NonOrientationPreserving,
    PreconditionResidualTooLarge,
    SingularBoundarySystem,
    SingularMinor,
    ThermoelasticError,
    ThermoelasticNumericalError,
    ThermoelasticValidationError,
)
from app.core.logger import configure_logging

__all__ = [
    "BoundarySolveSingular",
    "CFLViolation",
    "ConfigurationError",
    "ConstraintViolated",
    "DegenerateF1N",
    "DegenerateLift",
    "InsufficientHistory",
    "InvalidDensity",
    "MassFluxNonzero",
    "MultiplicityMismatch",
    "NaNDetected",
    "NegativeTargetPressure",
    "NonOrientationPreserving",
    "PreconditionResidualTooLarge",
    "SingularBoundarySystem",
    "SingularMinor",
    "ThermoelasticError",
    "ThermoelasticNumericalError",
    "ThermoelasticValidationError",
    "configure_logging",
]
