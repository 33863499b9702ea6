"""Straightened free-boundary formulation.

Derivative stencils on the truncated half-space, the lifting functions
Phi+-, Phi-differentials and the straightened operator L(U, Phi), and the
involution residuals monitored along runs.
"""

from app.services.straightening.involutions import (
    BOUNDARY_NAMES,
    INTERIOR_NAMES,
    DriftSeries,
    InvolutionResiduals,
    boundary_residuals,
    diffeomorphism_perturbation,
    interior_residuals,
    involution_residuals,
    involution_transport_check,
    linearized_residual_norms,
    rho_relation_residual,
)
from app.services.straightening.lift import (
    ChiProfile,
    Lift,
    chi,
    chi_prime,
    chi_prime_max,
    lift_pair,
    smooth_step,
)
from app.services.straightening.operators import (
    PhiDifferentials,
    apply_L,
    phi_differentials,
    phi_differentials_from,
)
from app.services.straightening.stencils import Stencils, TangentialScheme

__all__ = [
    "BOUNDARY_NAMES",
    "INTERIOR_NAMES",
    "DriftSeries",
    "InvolutionResiduals",
    "boundary_residuals",
    "diffeomorphism_perturbation",
    "interior_residuals",
    "involution_residuals",
    "involution_transport_check",
    "linearized_residual_norms",
    "rho_relation_residual",
    "ChiProfile",
    "Lift",
    "chi",
    "chi_prime",
    "chi_prime_max",
    "lift_pair",
    "smooth_step",
    "PhiDifferentials",
    "apply_L",
    "phi_differentials",
    "phi_differentials_from",
    "Stencils",
    "TangentialScheme",
]
