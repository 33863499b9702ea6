"""Linearized problem around a basic state.

Basic states, the linearized operators and good unknowns, the W-variables
and their boundary conditions, boundary-source homogenization, auxiliary
quantities and the boundary quadratic-form cancellation.
"""

from app.services.linearized.auxiliary import AuxiliaryQuantities, auxiliary_eval
from app.services.linearized.basic_state import BasicState, build_basic_state
from app.services.linearized.boundary_lift import BoundaryLift, lift_boundary_source
from app.services.linearized.cancellation import (
    BoundaryHistory,
    CancellationReport,
    apply_D,
    cancellation_check,
    key2_residual,
    key3b_residual,
)
from app.services.linearized.operators import (
    alinhac_residual,
    apply_Bprime,
    apply_Bprime_e,
    apply_Lprime,
    apply_Lprime_e,
    b_coefficients,
    from_good_unknowns,
    front_lift,
    good_unknowns,
    linearization_errors,
)
from app.services.linearized.wvars import (
    BoundaryMatricesW,
    LinearField,
    Representation,
    boundary_conditions_W,
    boundary_matrices_W,
    from_W,
    to_W,
)

__all__ = [
    "AuxiliaryQuantities",
    "auxiliary_eval",
    "BasicState",
    "build_basic_state",
    "BoundaryLift",
    "lift_boundary_source",
    "BoundaryHistory",
    "CancellationReport",
    "apply_D",
    "cancellation_check",
    "key2_residual",
    "key3b_residual",
    "alinhac_residual",
    "apply_Bprime",
    "apply_Bprime_e",
    "apply_Lprime",
    "apply_Lprime_e",
    "b_coefficients",
    "from_good_unknowns",
    "front_lift",
    "good_unknowns",
    "linearization_errors",
    "BoundaryMatricesW",
    "LinearField",
    "Representation",
    "boundary_conditions_W",
    "boundary_matrices_W",
    "from_W",
    "to_W",
]
