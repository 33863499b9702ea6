"""Pointwise thermoelastic state and the constitutive relations built on it."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.core.errors import NonOrientationPreserving
from app.models.layout import UnknownLayout
from app.models.material import EOSValues, MaterialParams

logger = logging.getLogger(__name__)


def density_from_F(F) -> np.ndarray:
    """Return rho = rho_ref / det F with rho_ref = 1.

    Accepts a single (d, d) matrix or a stack (..., d, d).

    Raises:
        NonOrientationPreserving: If det F <= 0 anywhere

    Example:
        >>> float(density_from_F(np.diag([0.5, 1.0])))
        2.0
    """
    det = np.linalg.det(np.asarray(F, dtype=float))
    if np.any(~(det > 0.0)):
        raise NonOrientationPreserving(f"det F must be > 0, got min {np.min(det)}")
    return 1.0 / det


def internal_energy(F, entropy, params: MaterialParams) -> np.ndarray:
    """Total internal energy sum_ij (a_j/2) F_ij^2 + e(rho(F), S).

    Raises:
        NonOrientationPreserving: If det F <= 0
    """
    F = np.asarray(F, dtype=float)
    rho = density_from_F(F)
    a = np.asarray(params.elastic)
    elastic = 0.5 * np.sum(a * F * F, axis=(-2, -1))
    return elastic + params.eos().evaluate(rho, entropy).energy


@dataclass
class ThermoState:
    """Primary unknowns U = (p, v, F, S) at a single point.

    Attributes:
        pressure: Pressure p
        velocity: Velocity vector v, length d
        F: Deformation gradient, (d, d)
        entropy: Specific entropy S
    """
    pressure: float
    velocity: np.ndarray
    F: np.ndarray
    entropy: float
    _rho: Optional[float] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.velocity = np.asarray(self.velocity, dtype=float).reshape(-1)
        self.F = np.asarray(self.F, dtype=float)
        d = self.velocity.size
        if self.F.shape != (d, d):
            raise ValueError(f"F must be {d}x{d}, got {self.F.shape}")

    @property
    def dim(self) -> int:
        return self.velocity.size

    @property
    def density(self) -> float:
        if self._rho is None:
            self._rho = float(density_from_F(self.F))
        return self._rho

    def thermo(self, params: MaterialParams) -> EOSValues:
        """EOS values at (rho(F), S)."""
        return params.eos().evaluate(self.density, self.entropy)

    def sound_speed_sq(self, params: MaterialParams) -> float:
        return float(self.thermo(params).sound_speed_sq)

    def to_vector(self) -> np.ndarray:
        layout = UnknownLayout(self.dim)
        return layout.assemble(self.pressure, self.velocity, self.F, self.entropy)

    @classmethod
    def from_vector(cls, U, dim: int) -> "ThermoState":
        layout = UnknownLayout(dim)
        p, v, F, S = layout.split(np.asarray(U, dtype=float))
        return cls(float(p), v.copy(), F.copy(), float(S))

    @classmethod
    def at_rest(cls, F, params: MaterialParams, entropy: float = 0.0) -> "ThermoState":
        """State with zero velocity and the EOS pressure p(rho(F), S)."""
        F = np.asarray(F, dtype=float)
        rho = float(density_from_F(F))
        p = float(params.eos().pressure(rho, entropy))
        return cls(p, np.zeros(F.shape[0]), F, entropy)


def cauchy_stress(state: ThermoState, params: MaterialParams) -> np.ndarray:
    """Cauchy stress T = rho F diag(a) F^T - p I (symmetric by construction).

    Raises:
        NonOrientationPreserving: If det F <= 0
    """
    F = state.F
    rho = state.density
    a = np.asarray(params.elastic)
    T = rho * (F * a) @ F.T - state.pressure * np.eye(state.dim)
    return 0.5 * (T + T.T)
