"""Material parameters and equations of state.

The internal energy has the form

    epsilon(F, S) = sum_ij (a_j / 2) F_ij**2 + e(rho, S)

and only the thermal part e(rho, S) is pluggable. Every EOS exposes the same
evaluation contract returning (p, c^2, theta, e), so the rest of the package
never branches on the closure.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Tuple

import numpy as np

from app.core.errors import ConfigurationError, InvalidDensity, NegativeTargetPressure

logger = logging.getLogger(__name__)


class EOSKind(Enum):
    """Available thermal closures e(rho, S)."""
    GAMMA_LAW = "gamma_law"
    STIFFENED_GAS = "stiffened_gas"


class EOSValues(NamedTuple):
    """Thermodynamic values returned by every EOS evaluation."""
    pressure: np.ndarray
    sound_speed_sq: np.ndarray
    temperature: np.ndarray
    energy: np.ndarray


@dataclass(frozen=True)
class MaterialParams:
    """Material description shared by all modules.

    Attributes:
        dim: Space dimension d (2 or 3)
        gamma: Adiabatic exponent, must exceed 1
        eos_kind: Thermal closure selector
        p_inf: Stiffening pressure (stiffened gas only, 0 gives the gamma law)
        elastic: Elastic coefficients a_j per column of F (default all 1)
        rho_ref: Reference density, fixed to 1
    """
    dim: int = 2
    gamma: float = 1.4
    eos_kind: EOSKind = EOSKind.GAMMA_LAW
    p_inf: float = 0.0
    elastic: Tuple[float, ...] = field(default=())
    rho_ref: float = 1.0

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigurationError(f"dim must be 2 or 3, got {self.dim}")
        if not self.gamma > 1.0:
            raise ConfigurationError(f"gamma must be > 1, got {self.gamma}")
        if self.rho_ref != 1.0:
            raise ConfigurationError(f"rho_ref is fixed to 1, got {self.rho_ref}")
        if self.p_inf < 0.0:
            raise ConfigurationError(f"p_inf must be >= 0, got {self.p_inf}")
        if not self.elastic:
            object.__setattr__(self, "elastic", (1.0,) * self.dim)
        if len(self.elastic) != self.dim:
            raise ConfigurationError(
                f"elastic needs {self.dim} coefficients, got {len(self.elastic)}"
            )
        if any(a <= 0.0 for a in self.elastic):
            raise ConfigurationError(f"elastic coefficients must be > 0, got {self.elastic}")

    @property
    def n_unknowns(self) -> int:
        """Size d^2 + d + 2 of the unknown vector U = (p, v, F, S)."""
        return self.dim * self.dim + self.dim + 2

    @property
    def is_unit_elastic(self) -> bool:
        return all(a == 1.0 for a in self.elastic)

    def eos(self) -> "EquationOfState":
        return EquationOfState(self)


def _check_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if np.any(~(rho > 0.0)):
        raise InvalidDensity(f"density must be > 0, got min {np.min(rho)}")
    return rho


class EquationOfState:
    """Evaluate the thermal closure of a material.

    Both closures share the bulk modulus rho*c^2 = gamma*exp(S)*rho**gamma;
    the stiffened gas only shifts the pressure by -p_inf and adds p_inf/rho to e.

    Example:
        >>> eos = MaterialParams(dim=2, gamma=1.4).eos()
        >>> vals = eos.evaluate(1.0, 0.0)
        >>> float(vals.pressure), float(vals.sound_speed_sq), float(vals.energy)
        (1.0, 1.4, 2.5)
    """

    def __init__(self, params: MaterialParams):
        self.params = params
        self.gamma = params.gamma
        self.p_inf = params.p_inf if params.eos_kind is EOSKind.STIFFENED_GAS else 0.0

    def evaluate(self, rho, entropy) -> EOSValues:
        """Return (p, c^2, theta, e) at density rho and entropy S.

        Raises:
            InvalidDensity: If rho <= 0 anywhere
        """
        rho = _check_density(rho)
        g = self.gamma
        thermal = np.exp(entropy) * rho ** (g - 1.0)
        energy = thermal / (g - 1.0) + self.p_inf / rho
        pressure = rho * thermal - self.p_inf
        sound_speed_sq = g * thermal
        temperature = thermal / (g - 1.0)
        return EOSValues(pressure, sound_speed_sq, temperature, energy)

    def pressure(self, rho, entropy) -> np.ndarray:
        return self.evaluate(rho, entropy).pressure

    def sound_speed_sq(self, rho, entropy) -> np.ndarray:
        return self.evaluate(rho, entropy).sound_speed_sq

    def bulk_modulus(self, rho, entropy) -> np.ndarray:
        """rho * c^2."""
        rho = _check_density(rho)
        return self.gamma * np.exp(entropy) * rho ** self.gamma

    def bulk_modulus_derivatives(self, rho, entropy) -> Tuple[np.ndarray, np.ndarray]:
        """Partial derivatives of rho*c^2 with respect to rho and S."""
        rho = _check_density(rho)
        g = self.gamma
        k_s = g * np.exp(entropy) * rho ** g
        k_rho = g * g * np.exp(entropy) * rho ** (g - 1.0)
        return k_rho, k_s

    def entropy_from_pressure(self, rho, pressure) -> np.ndarray:
        """Invert p(rho, S) for S at fixed density.

        Raises:
            InvalidDensity: If rho <= 0
            NegativeTargetPressure: If p + p_inf <= 0 (outside the EOS range)
        """
        rho = _check_density(rho)
        shifted = np.asarray(pressure, dtype=float) + self.p_inf
        if np.any(~(shifted > 0.0)):
            raise NegativeTargetPressure(
                f"pressure {np.min(pressure)} is outside the EOS range (p > {-self.p_inf})"
            )
        return np.log(shifted) - self.gamma * np.log(rho)

    def density_from_pressure(self, pressure, entropy) -> np.ndarray:
        """Invert p(rho, S) for rho at fixed entropy.

        Raises:
            NegativeTargetPressure: If p + p_inf <= 0
        """
        shifted = np.asarray(pressure, dtype=float) + self.p_inf
        if np.any(~(shifted > 0.0)):
            raise NegativeTargetPressure(
                f"pressure {np.min(pressure)} is outside the EOS range (p > {-self.p_inf})"
            )
        return (shifted * np.exp(-np.asarray(entropy, dtype=float))) ** (1.0 / self.gamma)


def eos_eval(rho, entropy, params: MaterialParams) -> EOSValues:
    """Evaluate (p, c^2, theta, e) for the closure selected in ``params``."""
    return EquationOfState(params).evaluate(rho, entropy)
