"""Seeded identity suites reported by ``verify-identities`` and ``check-hyperbolicity``."""

from app.services.verification.identity_suite import (
    IdentityRecord,
    SuiteSizes,
    cancellation_suite,
    constrained_jump_state,
    default_basic_factory,
    default_sources,
    eigen_suite,
    hyperbolicity_suites,
    identity_suites,
    involution_initial_data,
    involution_suite,
    jump_suite,
    linearity_suite,
    linearization_suite,
    random_state,
    reconstruction_suite,
    rigidity_suite,
    stability_suite,
    structure_suite,
    write_identity_report,
)

__all__ = [
    "IdentityRecord",
    "SuiteSizes",
    "cancellation_suite",
    "constrained_jump_state",
    "default_basic_factory",
    "default_sources",
    "eigen_suite",
    "hyperbolicity_suites",
    "identity_suites",
    "involution_initial_data",
    "involution_suite",
    "jump_suite",
    "linearity_suite",
    "linearization_suite",
    "random_state",
    "reconstruction_suite",
    "rigidity_suite",
    "stability_suite",
    "structure_suite",
    "write_identity_report",
]
