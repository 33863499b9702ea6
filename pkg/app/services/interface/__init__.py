"""Jump conditions, boundary operators, backgrounds and the rigidity probe."""

from app.services.interface.background import BackgroundState, build_background
from app.services.interface.jump import (
    BoundaryForm,
    JumpState,
    boundary_operator,
    boundary_operator_field,
    rh_residual,
    rh_residual_names,
    varrho_eval,
)
from app.services.interface.rigidity import (
    GaussNewtonSolver,
    RigidityReport,
    TrialResult,
    rigidity_probe,
)

__all__ = [
    "BackgroundState",
    "build_background",
    "BoundaryForm",
    "JumpState",
    "boundary_operator",
    "boundary_operator_field",
    "rh_residual",
    "rh_residual_names",
    "varrho_eval",
    "GaussNewtonSolver",
    "RigidityReport",
    "TrialResult",
    "rigidity_probe",
]
