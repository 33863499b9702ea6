"""Parameterized bump sources for the interior equations and the boundary conditions.

Every source is b(t) * profile * cos(2 pi k (x_2 + ... + x_d)) on one
component, with the compactly supported time bump

    b(t) = exp(1 - 1/(1 - s^2)),  s = 2 t / tau - 1  on (0, tau), zero elsewhere,

so all sources vanish in the past.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from app.core.errors import ConfigurationError
from app.models.grid import Grid
from app.models.layout import UnknownLayout

logger = logging.getLogger(__name__)


def time_bump(t, tau: float) -> np.ndarray:
    """C-infinity bump on (0, tau) with peak value 1 at tau/2.

    Example:
        >>> float(time_bump(0.5, 1.0)), float(time_bump(-0.1, 1.0)), float(time_bump(1.0, 1.0))
        (1.0, 0.0, 0.0)
    """
    s = 2.0 * np.asarray(t, dtype=float) / tau - 1.0
    inside = np.abs(s) < 1.0
    safe = np.where(inside, s, 0.0)
    return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - safe * safe)), 0.0)


def time_bump_derivative(t, tau: float) -> np.ndarray:
    """d/dt of :func:`time_bump`."""
    s = 2.0 * np.asarray(t, dtype=float) / tau - 1.0
    inside = np.abs(s) < 1.0
    safe = np.where(inside, s, 0.0)
    ds = -2.0 * safe / (1.0 - safe * safe) ** 2
    return np.where(inside, time_bump(t, tau) * ds * 2.0 / tau, 0.0)


def _tangential_wave(coords: List[np.ndarray], wavenumber: int) -> np.ndarray:
    return np.cos(2.0 * np.pi * wavenumber * sum(coords))


@dataclass(frozen=True)
class InteriorBump:
    """Interior source on one component and side.

    Attributes:
        component: Component name, e.g. "p", "v1", "F21", "S"
        side: +1 or -1
        amplitude: Peak value
        wavenumber: Tangential wavenumber k
        center: Center of the Gaussian x_1 profile
        width: Width of the x_1 profile
        duration: tau of the time bump
    """
    component: str = "p"
    side: int = 1
    amplitude: float = 1.0
    wavenumber: int = 1
    center: float = 1.5
    width: float = 0.5
    duration: float = 0.5

    def __post_init__(self):
        if self.side not in (-1, 1):
            raise ConfigurationError(f"source side must be +1 or -1, got {self.side}")
        if self.width <= 0.0 or self.duration <= 0.0:
            raise ConfigurationError("source width and duration must be > 0")

    def spatial(self, grid: Grid) -> np.ndarray:
        coords = grid.coordinates()
        profile = np.exp(-((coords[0] - self.center) / self.width) ** 2)
        return self.amplitude * profile * _tangential_wave(coords[1:], self.wavenumber)


@dataclass(frozen=True)
class BoundaryBump:
    """Boundary source on one row of the boundary conditions.

    Attributes:
        row: Row index 0..2d (0 is the front condition)
        amplitude: Peak value
        wavenumber: Tangential wavenumber k
        duration: tau of the time bump
    """
    row: int = 0
    amplitude: float = 1.0
    wavenumber: int = 1
    duration: float = 0.5

    def spatial(self, grid: Grid) -> np.ndarray:
        return self.amplitude * _tangential_wave(grid.boundary_coordinates(), self.wavenumber)


@dataclass
class SourceModel:
    """Sum of interior and boundary bumps, with their spatial parts cached.

    Attributes:
        grid: Grid the sources live on
        interior: Interior bumps
        boundary: Boundary bumps
    """
    grid: Grid
    interior: List[InteriorBump] = field(default_factory=list)
    boundary: List[BoundaryBump] = field(default_factory=list)

    def __post_init__(self):
        layout = UnknownLayout(self.grid.dim)
        names = layout.names()
        self._interior = []
        for bump in self.interior:
            if bump.component not in names:
                raise ConfigurationError(f"unknown source component {bump.component!r}; expected one of {names}")
            self._interior.append((bump, names.index(bump.component), bump.spatial(self.grid)))
        rows = 2 * self.grid.dim + 1
        self._boundary = []
        for bump in self.boundary:
            if not 0 <= bump.row < rows:
                raise ConfigurationError(f"boundary source row must lie in [0, {rows}), got {bump.row}")
            self._boundary.append((bump, bump.spatial(self.grid)))
        self._n = layout.n

    @property
    def is_zero(self) -> bool:
        return not any(b.amplitude for b in self.interior) and not any(b.amplitude for b in self.boundary)

    @property
    def has_boundary(self) -> bool:
        return any(b.amplitude for b in self.boundary)

    def interior_at(self, t: float) -> Tuple[np.ndarray, np.ndarray]:
        """(f-, f+) at time t."""
        shape = (self._n,) + self.grid.shape
        f = [np.zeros(shape), np.zeros(shape)]
        for bump, comp, spatial in self._interior:
            weight = float(time_bump(t, bump.duration))
            if weight:
                f[0 if bump.side < 0 else 1][comp] += weight * spatial
        return f[0], f[1]

    def boundary_at(self, t: float, derivative: bool = False) -> np.ndarray:
        """g (or d_t g) at time t, shape (2d+1, *boundary_shape)."""
        g = np.zeros((2 * self.grid.dim + 1,) + self.grid.boundary_shape)
        for bump, spatial in self._boundary:
            fn = time_bump_derivative if derivative else time_bump
            weight = float(fn(t, bump.duration))
            if weight:
                g[bump.row] += weight * spatial
        return g

    def support_end(self) -> Optional[float]:
        durations = [b.duration for b in self.interior] + [b.duration for b in self.boundary]
        return max(durations) if durations else None
