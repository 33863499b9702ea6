"""Finite-difference and spectral derivative stencils on the structured grid."""

from __future__ import annotations

import logging
from enum import Enum

import numpy as np

from app.models.grid import Grid

logger = logging.getLogger(__name__)


class TangentialScheme(Enum):
    """How periodic tangential derivatives are taken."""
    CENTRAL = "central"
    SPECTRAL = "spectral"


class Stencils:
    """Derivative operators matching the solver's order.

    x_1 derivatives are second-order centered inside and second-order one-sided
    at x_1 = 0 and x_1 = x_max. Tangential derivatives are periodic, either
    centered or spectral (FFT with the Nyquist mode removed).

    Args:
        grid: Grid the arrays live on
        tangential: Tangential scheme

    Example:
        >>> st = Stencils(Grid(dim=2, n1=8, n_tan=8))
        >>> u = np.ones((1,) + st.grid.shape)
        >>> float(np.abs(st.d(u, 1)).max())
        0.0
    """

    def __init__(self, grid: Grid, tangential: TangentialScheme = TangentialScheme.CENTRAL):
        self.grid = grid
        self.tangential = TangentialScheme(tangential)
        k = np.fft.fftfreq(grid.n_tan, d=grid.h_tan)
        k[grid.n_tan // 2] = 0.0
        self._ik = 2j * np.pi * k

    def d1(self, u: np.ndarray) -> np.ndarray:
        """x_1 derivative of a field with spatial axes last.

        Built from first differences, so it vanishes exactly on constants.
        """
        ax = self.grid.axis(1)
        du = np.moveaxis(np.diff(u, axis=ax), ax, 0)
        out = np.empty((du.shape[0] + 1,) + du.shape[1:], dtype=du.dtype)
        out[1:-1] = du[1:] + du[:-1]
        out[0] = 3.0 * du[0] - du[1]
        out[-1] = 3.0 * du[-1] - du[-2]
        return np.moveaxis(out, 0, ax) / (2.0 * self.grid.h1)

    def dtan(self, u: np.ndarray, i: int) -> np.ndarray:
        """Periodic derivative in tangential direction i (2..d).

        Works on full fields and boundary arrays alike.
        """
        axis = self.grid.axis(i)
        if self.tangential is TangentialScheme.SPECTRAL:
            shape = [1] * u.ndim
            shape[axis] = self.grid.n_tan
            uh = np.fft.fft(u, axis=axis)
            return np.real(np.fft.ifft(uh * self._ik.reshape(shape), axis=axis))
        h = self.grid.h_tan
        return (np.roll(u, -1, axis=axis) - np.roll(u, 1, axis=axis)) / (2.0 * h)

    def d(self, u: np.ndarray, i: int) -> np.ndarray:
        """Derivative in 1-based direction i."""
        return self.d1(u) if i == 1 else self.dtan(u, i)

    def grad(self, u: np.ndarray):
        return [self.d(u, i) for i in range(1, self.grid.dim + 1)]

    def boundary_grad(self, u: np.ndarray):
        """Tangential gradient (d_2, ..., d_d) of a boundary array."""
        return [self.dtan(u, i) for i in range(2, self.grid.dim + 1)]

    def trace(self, u: np.ndarray) -> np.ndarray:
        """Restriction to x_1 = 0."""
        return np.take(u, 0, axis=self.grid.axis(1))

    def normal_trace_derivative(self, u: np.ndarray) -> np.ndarray:
        """Second-order one-sided d_1 u at x_1 = 0."""
        ax = self.grid.axis(1)
        u0, u1, u2 = (np.take(u, k, axis=ax) for k in range(3))
        return (3.0 * (u1 - u0) - (u2 - u1)) / (2.0 * self.grid.h1)
