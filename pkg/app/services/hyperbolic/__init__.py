"""Coefficient matrices of the symmetric system and their transformed forms.

Contains the dense and matrix-free assembly of A0, A_i and the straightened
normal matrix, the zeroth-order operator of the linearization, the change of
variables J with the congruent matrices cal_A_i, and the boundary-matrix
eigenstructure check.
"""

from app.services.hyperbolic.assembly import (
    LiftDerivatives,
    apply_A0,
    apply_A1tilde,
    apply_Ai,
    assemble_A,
    assemble_A0_dense,
    assemble_A1tilde,
    assemble_Ai_dense,
    combine_A1tilde,
    dump_matrix_csv,
    expanded_residual,
    normal_matrix,
    symmetric_residual,
    zeroth_order_apply,
    zeroth_order_matrix,
)
from app.services.hyperbolic.calA import (
    CoefficientMatrices,
    assemble_calA4,
    assemble_J_and_calA,
    boundary_block,
    rho_F1N,
    transform_J,
    transform_Jinv,
)
from app.services.hyperbolic.eigencheck import (
    EigenReport,
    boundary_matrix_eigencheck,
    cluster_eigenvalues,
    expected_pattern,
)

__all__ = [
    "LiftDerivatives",
    "apply_A0",
    "apply_A1tilde",
    "apply_Ai",
    "assemble_A",
    "assemble_A0_dense",
    "assemble_A1tilde",
    "assemble_Ai_dense",
    "combine_A1tilde",
    "dump_matrix_csv",
    "expanded_residual",
    "normal_matrix",
    "symmetric_residual",
    "zeroth_order_apply",
    "zeroth_order_matrix",
    "CoefficientMatrices",
    "assemble_calA4",
    "assemble_J_and_calA",
    "boundary_block",
    "rho_F1N",
    "transform_J",
    "transform_Jinv",
    "EigenReport",
    "boundary_matrix_eigencheck",
    "cluster_eigenvalues",
    "expected_pattern",
]
