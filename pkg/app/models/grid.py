"""Structured grid on the truncated straightened half-space.

x_1 is discretized uniformly with ``n1`` cells on [0, x_max]; every tangential
direction is the periodic unit interval with ``n_tan`` nodes. Field arrays are
component-first with spatial axes (x_1, x_2[, x_3]); boundary arrays carry the
tangential axes only. For a 1-based direction i the array axis is i - 1 - d,
which addresses both full fields and boundary arrays (i >= 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from app.core.errors import ConfigurationError


@dataclass(frozen=True)
class Grid:
    """Uniform grid description.

    Attributes:
        dim: Space dimension d
        n1: Number of cells in x_1
        n_tan: Nodes per tangential direction (even)
        x_max: Truncation of the half-space
        cfl: CFL number used to pick the time step
    """
    dim: int = 2
    n1: int = 128
    n_tan: int = 16
    x_max: float = 8.0
    cfl: float = 0.4

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigurationError(f"grid dim must be 2 or 3, got {self.dim}")
        if self.n1 < 4:
            raise ConfigurationError(f"need at least 4 cells in x_1, got {self.n1}")
        if self.n_tan < 2 or self.n_tan % 2:
            raise ConfigurationError(f"n_tan must be even and >= 2, got {self.n_tan}")
        if self.x_max <= 0.0:
            raise ConfigurationError(f"x_max must be > 0, got {self.x_max}")
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigurationError(f"cfl must lie in (0, 1], got {self.cfl}")

    @property
    def h1(self) -> float:
        return self.x_max / self.n1

    @property
    def h_tan(self) -> float:
        return 1.0 / self.n_tan

    @property
    def x1(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.n1 + 1)

    @property
    def x_tan(self) -> np.ndarray:
        return np.arange(self.n_tan) * self.h_tan

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n1 + 1,) + (self.n_tan,) * (self.dim - 1)

    @property
    def boundary_shape(self) -> Tuple[int, ...]:
        return (self.n_tan,) * (self.dim - 1)

    def spacing(self, i: int) -> float:
        """Grid spacing in 1-based direction i."""
        return self.h1 if i == 1 else self.h_tan

    def axis(self, i: int) -> int:
        return i - 1 - self.dim

    def coordinates(self) -> List[np.ndarray]:
        """Broadcast coordinate arrays (x_1, x_2, ...) of shape ``shape``."""
        axes = [self.x1] + [self.x_tan] * (self.dim - 1)
        return list(np.meshgrid(*axes, indexing="ij"))

    def boundary_coordinates(self) -> List[np.ndarray]:
        """Tangential coordinate arrays of shape ``boundary_shape``."""
        return list(np.meshgrid(*([self.x_tan] * (self.dim - 1)), indexing="ij"))

    def x1_weights(self) -> np.ndarray:
        """Trapezoid quadrature weights in x_1."""
        w = np.full(self.n1 + 1, self.h1)
        w[0] = w[-1] = 0.5 * self.h1
        return w

    def cell_weights(self) -> np.ndarray:
        """Quadrature weights on the full grid (trapezoid x tangential midpoint)."""
        w = self.x1_weights() * self.h_tan ** (self.dim - 1)
        return np.broadcast_to(w.reshape((-1,) + (1,) * (self.dim - 1)), self.shape)

    def boundary_weight(self) -> float:
        return self.h_tan ** (self.dim - 1)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.dim, self.n1 * factor, self.n_tan * factor, self.x_max, self.cfl)
