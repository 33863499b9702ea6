"""Geometry of the front x_1 = phi(t, x')."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class FrontGeometry:
    """Front height, tangential gradient and speed at one or many boundary points.

    Attributes:
        phi: Front height phi
        grad_phi: Tangential gradient (d_2 phi, ..., d_d phi), shape (d-1, *shape)
        dt_phi: Front speed d_t phi
    """
    phi: np.ndarray
    grad_phi: np.ndarray
    dt_phi: np.ndarray

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.grad_phi = np.asarray(self.grad_phi, dtype=float)
        self.dt_phi = np.asarray(self.dt_phi, dtype=float)

    @classmethod
    def flat(cls, dim: int, dt_phi: float = 0.0) -> "FrontGeometry":
        """Static (or uniformly moving) planar front x_1 = 0."""
        return cls(0.0, np.zeros(dim - 1), dt_phi)

    @classmethod
    def from_gradient(cls, grad_phi, dt_phi=0.0, phi=0.0) -> "FrontGeometry":
        return cls(phi, grad_phi, dt_phi)

    @property
    def dim(self) -> int:
        return self.grad_phi.shape[0] + 1

    @property
    def normal(self) -> np.ndarray:
        """Spatial normal N = (1, -d_2 phi, ..., -d_d phi); N_1 = 1 exactly."""
        N = np.empty((self.dim,) + self.grad_phi.shape[1:])
        N[0] = 1.0
        N[1:] = -self.grad_phi
        return N

    def normal_component(self, vec: np.ndarray) -> np.ndarray:
        """w_N = sum_l w_l N_l for a vector with components on axis 0."""
        return np.einsum("l...,l...->...", vec, self.normal)

    def F_N(self, F: np.ndarray) -> np.ndarray:
        """F_jN = sum_l F_lj N_l for all columns j; returns shape (d, *shape)."""
        return np.einsum("lj...,l...->j...", F, self.normal)
