"""Fixed-depth history of equally spaced time levels.

Time derivatives of stored traces or fields are taken with backward
differences at the newest level. The weights for d_t^k use the k + 2 newest
levels, which makes them second order for every k.
"""

from __future__ import annotations

import logging
from collections import deque
from functools import lru_cache
from math import factorial
from typing import Deque, Optional, Tuple

import numpy as np

from app.core.errors import ConfigurationError, InsufficientHistory

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def _unit_weights(order: int) -> Tuple[float, ...]:
    # Taylor system on the nodes 0, -1, ..., -(order + 1)
    points = order + 2
    nodes = -np.arange(points, dtype=float)
    V = np.vander(nodes, points, increasing=True).T
    rhs = np.zeros(points)
    rhs[order] = factorial(order)
    return tuple(np.linalg.solve(V, rhs))


def backward_difference_weights(order: int, dt: float) -> np.ndarray:
    """Weights w_m with d_t^k u(t_n) ~ sum_m w_m u(t_{n-m}).

    Example:
        >>> [round(w, 12) for w in backward_difference_weights(1, 1.0)]
        [1.5, -2.0, 0.5]
    """
    if order < 0:
        raise ConfigurationError(f"derivative order must be >= 0, got {order}")
    if order == 0:
        return np.array([1.0])
    return np.asarray(_unit_weights(order)) / dt ** order


class TraceHistory:
    """Ring buffer of the newest time levels of one array.

    Args:
        depth: Number of levels kept
        dt: Uniform spacing between appended levels

    Example:
        >>> h = TraceHistory(depth=3, dt=0.5)
        >>> for t in (0.0, 0.5, 1.0):
        ...     h.append(t, np.array([2.0 * t]))
        >>> float(h.derivative(1)[0])
        2.0
    """

    def __init__(self, depth: int, dt: float):
        if depth < 1:
            raise ConfigurationError(f"history depth must be >= 1, got {depth}")
        if not dt > 0.0:
            raise ConfigurationError(f"history spacing must be > 0, got {dt}")
        self.depth = depth
        self.dt = float(dt)
        self._levels: Deque[np.ndarray] = deque(maxlen=depth)
        self._times: Deque[float] = deque(maxlen=depth)

    def __len__(self) -> int:
        return len(self._levels)

    def append(self, t: float, values: np.ndarray) -> None:
        if self._times and not np.isclose(t - self._times[-1], self.dt, rtol=1e-9, atol=1e-14):
            logger.warning(f"History level at t={t} is not {self.dt} after t={self._times[-1]}")
        self._times.append(float(t))
        self._levels.append(np.array(values, dtype=float, copy=True))

    @property
    def latest(self) -> Optional[np.ndarray]:
        return self._levels[-1] if self._levels else None

    @property
    def time(self) -> Optional[float]:
        return self._times[-1] if self._times else None

    def levels_for(self, order: int) -> int:
        return 1 if order == 0 else order + 2

    def derivative(self, order: int) -> np.ndarray:
        """Backward-difference d_t^order at the newest level.

        Raises:
            InsufficientHistory: If fewer than order + 2 levels are stored
        """
        need = self.levels_for(order)
        if len(self._levels) < need:
            raise InsufficientHistory(
                f"d_t^{order} needs {need} stored levels, have {len(self._levels)}"
            )
        weights = backward_difference_weights(order, self.dt)
        out = np.zeros_like(self._levels[-1])
        for m, w in enumerate(weights):
            out = out + w * self._levels[-1 - m]
        return out

    def clear(self) -> None:
        self._levels.clear()
        self._times.clear()
