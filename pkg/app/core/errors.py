"""Exception hierarchy for the thermoelastic contact-discontinuity toolkit.

All package-specific exceptions inherit from ``ThermoelasticError``. Two
branches mirror the builtin a caller would naturally catch:

- ``ThermoelasticValidationError`` (also a ``ValueError``): the inputs violate a
  modeling assumption or a precondition. The CLI maps these to exit code 1.
- ``ThermoelasticNumericalError`` (also a ``RuntimeError``): a numerical
  procedure broke down on admissible inputs. The CLI maps these to exit code 2.
"""

from __future__ import annotations

from typing import Optional


class ThermoelasticError(Exception):
    """Base exception for all thermoelastic toolkit errors."""
    pass


class ThermoelasticValidationError(ThermoelasticError, ValueError):
    """Inputs violate a modeling assumption or operation precondition."""
    pass


class ThermoelasticNumericalError(ThermoelasticError, RuntimeError):
    """A numerical procedure failed on otherwise admissible inputs."""
    pass


class NonOrientationPreserving(ThermoelasticValidationError):
    """Deformation gradient with non-positive determinant.

    Raised when:
    - det F <= 0 at any evaluated point
    """
    pass


class InvalidDensity(ThermoelasticValidationError):
    """Non-positive density handed to the equation of state.

    Raised when:
    - rho <= 0 in an EOS evaluation or inversion
    """
    pass


class NegativeTargetPressure(ThermoelasticValidationError):
    """The EOS cannot be inverted for the requested pressure.

    Raised when:
    - the background jump relation forces a non-positive left pressure
    - an entropy inversion is requested for a pressure outside the EOS range
    """
    pass


class DegenerateLift(ThermoelasticValidationError):
    """The lifting function has a vanishing normal derivative.

    Raised when:
    - |d1 Phi| < 1e-8 at some grid point
    - the front amplitude violates the smallness bound of the lift
    """
    pass


class DegenerateF1N(ThermoelasticValidationError):
    """The normal stretch rho*F_1N vanishes (contact assumption broken).

    Raised when:
    - |rho F_1N| < 1e-10 where the W-variables are built
    """
    pass


class ConstraintViolated(ThermoelasticValidationError):
    """Traces do not satisfy a boundary constraint the operation relies on.

    Raised when:
    - the varrho form of the boundary operator is requested off the F_jN = 0 manifold
    - a basic state fails its boundary constraints at construction
    """
    pass


class SingularMinor(ThermoelasticValidationError):
    """The tangential minor defining varrho(F) is singular.

    Raised when:
    - |F_22| (d=2) or |F_22 F_33 - F_23 F_32| (d=3) < 1e-12
    """
    pass


class MassFluxNonzero(ThermoelasticValidationError):
    """Mass crosses the front, so the traces do not form a contact.

    Raised when:
    - |m_N| exceeds the tolerance on either side of the front
    """
    pass


class PreconditionResidualTooLarge(ThermoelasticValidationError):
    """Boundary traces are too far from the boundary conditions to analyse.

    Raised when:
    - boundary-condition residuals exceed 1e-6 before a cancellation check
    """
    pass


class InsufficientHistory(ThermoelasticValidationError):
    """Too few stored time levels for the requested time derivative.

    Raised when:
    - a norm asks for d_t^k with fewer than k + 2 stored levels
    """
    pass


class ConfigurationError(ThermoelasticValidationError):
    """Configuration or user input validation error.

    Raised when:
    - an unknown key appears anywhere in a run configuration
    - a configured value violates a module precondition
    """
    pass


class MultiplicityMismatch(ThermoelasticNumericalError):
    """The numerical spectrum does not match the analytic eigenvalue pattern.

    Raised when:
    - clustered eigenvalue multiplicities differ from the expected pattern
    """
    pass


class SingularBoundarySystem(ThermoelasticNumericalError):
    """The boundary-lift system is ill-conditioned.

    Raised when:
    - the selected boundary submatrix has condition number > 1e8
    """
    pass


class CFLViolation(ThermoelasticNumericalError):
    """Requested time step exceeds the CFL bound.

    Raised when:
    - dt > cfl * h / lambda_max for the assembled coefficients
    """
    pass


class BoundarySolveSingular(ThermoelasticNumericalError):
    """The incoming-characteristic boundary system is ill-conditioned.

    Raised when:
    - the 2d x 2d incoming-amplitude system has condition number > 1e8
    """
    pass


class NaNDetected(ThermoelasticNumericalError):
    """Non-finite values appeared in the solution.

    Raised when:
    - any field or front value is NaN or infinite after a time step
    """

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step
