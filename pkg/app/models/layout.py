"""Index map of the unknown vector U = (p, v_1..v_d, F_1, ..., F_d, S).

Columns F_k of the deformation gradient are stored one after the other
(column-major), so for 0-based component ``a`` and column ``k``

    p      -> 0
    v_a    -> 1 + a
    F_ak   -> 1 + d + k*d + a
    S      -> d*d + d + 1

For d = 2 this gives p, v1, v2, F11, F21, F12, F22, S.

Fields on a grid are component-first: shape (n, *grid_shape).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np


@dataclass(frozen=True)
class UnknownLayout:
    """Positions of p, v, F and S inside U for dimension ``dim``."""
    dim: int

    @property
    def n(self) -> int:
        return self.dim * self.dim + self.dim + 2

    @property
    def p(self) -> int:
        return 0

    @property
    def s(self) -> int:
        return self.n - 1

    def v(self, a: int) -> int:
        return 1 + a

    def F(self, a: int, k: int) -> int:
        return 1 + self.dim + k * self.dim + a

    @property
    def v_slice(self) -> slice:
        return slice(1, 1 + self.dim)

    @property
    def F_slice(self) -> slice:
        return slice(1 + self.dim, 1 + self.dim + self.dim * self.dim)

    def column(self, k: int) -> slice:
        """Slice of column F_k inside U."""
        start = 1 + self.dim + k * self.dim
        return slice(start, start + self.dim)

    def names(self) -> List[str]:
        """Human readable component names in storage order (1-based labels)."""
        d = self.dim
        names = ["p"] + [f"v{a + 1}" for a in range(d)]
        for k in range(d):
            names += [f"F{a + 1}{k + 1}" for a in range(d)]
        return names + ["S"]

    def split(self, U: np.ndarray):
        """Return (p, v, F, S) views of a component-first array.

        ``F`` has shape (d, d, *grid) with F[a, k] the (a, k) entry.
        """
        d = self.dim
        p = U[self.p]
        v = U[self.v_slice]
        cols = U[self.F_slice].reshape((d, d) + U.shape[1:])
        # cols[k, a] is F_ak
        F = np.swapaxes(cols, 0, 1)
        S = U[self.s]
        return p, v, F, S

    def assemble(self, p, v, F, S) -> np.ndarray:
        """Inverse of :meth:`split`."""
        d = self.dim
        p = np.asarray(p, dtype=float)
        shape = p.shape
        U = np.empty((self.n,) + shape)
        U[self.p] = p
        U[self.v_slice] = np.asarray(v, dtype=float).reshape((d,) + shape)
        F = np.asarray(F, dtype=float).reshape((d, d) + shape)
        U[self.F_slice] = np.swapaxes(F, 0, 1).reshape((d * d,) + shape)
        U[self.s] = S
        return U
