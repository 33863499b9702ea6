"""Lifting functions Phi+- = +-x_1 + chi(x_1) phi(t, x').

chi is 1 on [-1, 1], compactly supported and has |chi'| < 1. It is built as
1 - step((|r| - 1)/w) where ``step`` is the normalized cumulative integral of
the C-infinity mollifier exp(-1/(1 - (2u - 1)^2)) on [0, 1], tabulated once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from app.core.errors import DegenerateLift
from app.models.grid import Grid
from app.services.hyperbolic.assembly import DEGENERATE_LIFT_TOL, LiftDerivatives
from app.services.straightening.stencils import Stencils

logger = logging.getLogger(__name__)

TABLE_POINTS = 20001


class ChiProfile(Enum):
    """Admissible cutoffs: transition width 2 (support [-3, 3]) or 3 (support [-4, 4])."""
    STANDARD = "standard"
    WIDE = "wide"

    @property
    def width(self) -> float:
        return 2.0 if self is ChiProfile.STANDARD else 3.0

    @property
    def support(self) -> float:
        return 1.0 + self.width


def _mollifier(u: np.ndarray) -> np.ndarray:
    s = 2.0 * u - 1.0
    out = np.zeros_like(u)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@lru_cache(maxsize=1)
def _step_table():
    u = np.linspace(0.0, 1.0, TABLE_POINTS)
    m = _mollifier(u)
    cum = cumulative_trapezoid(m, u, initial=0.0)
    total = cum[-1]
    return u, cum / total, m / total


def smooth_step(u) -> np.ndarray:
    """0 for u <= 0, 1 for u >= 1, C-infinity in between."""
    table_u, table_step, _ = _step_table()
    return np.interp(np.asarray(u, dtype=float), table_u, table_step, left=0.0, right=1.0)


def chi(r, profile: ChiProfile = ChiProfile.STANDARD) -> np.ndarray:
    """Cutoff chi(r): 1 on [-1, 1], 0 outside the profile's support."""
    w = profile.width
    return 1.0 - smooth_step((np.abs(np.asarray(r, dtype=float)) - 1.0) / w)


def chi_prime(r, profile: ChiProfile = ChiProfile.STANDARD) -> np.ndarray:
    """Derivative of :func:`chi`."""
    table_u, _, table_density = _step_table()
    r = np.asarray(r, dtype=float)
    w = profile.width
    density = np.interp((np.abs(r) - 1.0) / w, table_u, table_density, left=0.0, right=0.0)
    return -np.sign(r) * density / w


def chi_prime_max(profile: ChiProfile = ChiProfile.STANDARD) -> float:
    _, _, table_density = _step_table()
    return float(np.max(table_density) / profile.width)


@dataclass
class Lift:
    """Lift of a front function to one side of the straightened domain.

    Attributes:
        grid: Grid the lift is tabulated on
        sign: +1 for Phi+, -1 for Phi-
        phi: Front function on the boundary torus
        dt_phi: Its time derivative
        profile: Cutoff profile
        stencils: Stencils used for the lift derivatives (same as for fields)
    """
    grid: Grid
    sign: int
    phi: np.ndarray
    dt_phi: Optional[np.ndarray] = None
    profile: ChiProfile = ChiProfile.STANDARD
    stencils: Optional[Stencils] = None

    def __post_init__(self):
        self.phi = np.broadcast_to(np.asarray(self.phi, dtype=float), self.grid.boundary_shape).copy()
        if self.dt_phi is None:
            self.dt_phi = np.zeros(self.grid.boundary_shape)
        self.dt_phi = np.broadcast_to(np.asarray(self.dt_phi, dtype=float), self.grid.boundary_shape).copy()
        self.stencils = self.stencils or Stencils(self.grid)
        self._derivatives: Optional[LiftDerivatives] = None

    @property
    def chi_values(self) -> np.ndarray:
        """chi(x_1) broadcast against the spatial shape."""
        values = chi(self.grid.x1, self.profile)
        return values.reshape((-1,) + (1,) * (self.grid.dim - 1))

    @property
    def Phi(self) -> np.ndarray:
        x1 = self.grid.coordinates()[0]
        return self.sign * x1 + self.chi_values * self.phi[None, ...]

    @property
    def Psi_profile(self) -> np.ndarray:
        """chi(x_1) on the full grid, the lift of a unit front perturbation."""
        return np.broadcast_to(self.chi_values, self.grid.shape)

    def derivatives(self) -> LiftDerivatives:
        """d_t Phi, d_1 Phi and tangential derivatives computed with the field stencils.

        Raises:
            DegenerateLift: If |d_1 Phi| < 1e-8 somewhere
        """
        if self._derivatives is None:
            Phi = self.Phi
            d1 = self.stencils.d1(Phi)
            if np.any(np.abs(d1) < DEGENERATE_LIFT_TOL):
                raise DegenerateLift(f"|d1 Phi| < {DEGENERATE_LIFT_TOL} on the grid")
            margin = float(np.min(self.sign * d1))
            if margin < 0.5:
                logger.warning(f"Lift margin min(+-d1 Phi) = {margin:.4f} below 1/2")
            grad = np.stack([self.stencils.dtan(Phi, i) for i in range(2, self.grid.dim + 1)])
            dt = self.chi_values * self.dt_phi[None, ...]
            self._derivatives = LiftDerivatives(np.broadcast_to(dt, self.grid.shape).copy(), d1, grad)
        return self._derivatives

    def boundary_derivatives(self) -> LiftDerivatives:
        """Lift derivatives restricted to x_1 = 0."""
        full = self.derivatives()
        return LiftDerivatives(full.dt[0], full.d1[0], full.grad[:, 0])


def lift_pair(grid: Grid, phi, dt_phi=None, profile: ChiProfile = ChiProfile.STANDARD,
              stencils: Optional[Stencils] = None):
    """Return (Lift-, Lift+) for a common front function."""
    return tuple(Lift(grid, s, phi, dt_phi, profile, stencils) for s in (-1, +1))
