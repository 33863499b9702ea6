"""Discrete Sobolev norms on the truncated half-space and on the boundary torus.

Integer-order norms sum squared quadrature L2 norms of finite-difference
derivatives; time derivatives come from a TraceHistory of the field. The
boundary norms of fractional order r use the DFT of the trace (and of its
time series on a uniform window) with the multiplier (1 + 4 pi^2 |xi|^2)^{r/2}.
A time series on [0, T] is first continued past T by a higher-order
reflection under a smooth cutoff, so the window end is not a jump.
"""

from __future__ import annotations

import logging
from enum import Enum
from typing import Iterator, List, Optional, Tuple

import numpy as np

from app.core.errors import ConfigurationError
from app.models.grid import Grid
from app.models.history import TraceHistory
from app.services.straightening.stencils import Stencils
from app.utils.helpers import pairwise_sum

logger = logging.getLogger(__name__)


class NormKind(Enum):
    FULL = "full"
    TANGENTIAL = "tangential"
    BOUNDARY_FRACTIONAL = "boundary_fractional"


def _directions(grid: Grid, boundary: bool, tangential: bool) -> List[int]:
    first = 2 if (boundary or tangential) else 1
    return list(range(first, grid.dim + 1))


def spatial_multi_indices(directions: List[int], m: int) -> Iterator[Tuple[int, ...]]:
    """Nondecreasing direction sequences of length <= m (one per multi-index)."""
    yield ()
    frontier = [()]
    for _ in range(m):
        nxt = []
        for seq in frontier:
            start = directions.index(seq[-1]) if seq else 0
            for i in directions[start:]:
                nxt.append(seq + (i,))
        for seq in nxt:
            yield seq
        frontier = nxt


def _squared_l2(u: np.ndarray, weights) -> float:
    u = u if u.ndim > np.ndim(weights) or np.ndim(weights) == 0 else u[None]
    return pairwise_sum(weights * np.sum(u * u, axis=0))


def _weights(stencils: Stencils, boundary: bool):
    grid = stencils.grid
    return grid.boundary_weight() if boundary else grid.cell_weights()


def _derivative_sum(u: np.ndarray, stencils: Stencils, m: int, boundary: bool, tangential: bool) -> float:
    weights = _weights(stencils, boundary)
    total = 0.0
    cache = {(): u}
    for seq in spatial_multi_indices(_directions(stencils.grid, boundary, tangential), m):
        if seq not in cache:
            cache[seq] = stencils.d(cache[seq[:-1]], seq[-1])
        total += _squared_l2(cache[seq], weights)
    return total


def sobolev_norm(u: np.ndarray, stencils: Stencils, m: int, boundary: bool = False,
                 tangential: bool = False) -> float:
    """Spatial H^m norm of a component-first field or boundary array stack.

    Args:
        u: (c, *grid) field, or (c, *boundary_shape) with ``boundary``
        stencils: Derivative stencils
        m: Order
        boundary: Integrate over the boundary torus (tangential derivatives only)
        tangential: Use only x_2..x_d derivatives on a full field

    Example:
        >>> grid = Grid(dim=2, n1=8, n_tan=4, x_max=1.0)
        >>> sobolev_norm(np.full((1,) + grid.shape, 2.0), Stencils(grid), 1)
        2.0
    """
    if m < 0:
        raise ConfigurationError(f"norm order must be >= 0, got {m}")
    return float(np.sqrt(_derivative_sum(np.asarray(u, dtype=float), stencils, m, boundary, tangential)))


def instant_norm(history: TraceHistory, stencils: Stencils, m: int, tangential: bool = False,
                 boundary: bool = False) -> float:
    """|||u(t)|||_m (or the tangential variant) with time derivatives from the history.

    Raises:
        InsufficientHistory: If d_t^m needs more stored levels
    """
    total = 0.0
    for kt in range(m + 1):
        total += _derivative_sum(history.derivative(kt), stencils, m - kt, boundary, tangential)
    return float(np.sqrt(total))


def _frequency_grid(grid: Grid, n_time: int = 0, dt: Optional[float] = None):
    axes = [np.fft.fftfreq(grid.n_tan, d=grid.h_tan)] * (grid.dim - 1)
    if n_time:
        axes = [np.fft.fftfreq(n_time, d=dt)] + axes
    mesh = np.meshgrid(*axes, indexing="ij")
    return sum(k * k for k in mesh)


def _analytic_step(u: np.ndarray) -> np.ndarray:
    """0 for u <= 0, 1 for u >= 1, every derivative zero at both ends."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)

    def flat(x):
        safe = np.where(x > 0.0, x, 1.0)
        return np.where(x > 0.0, np.exp(-1.0 / safe), 0.0)

    a, b = flat(u), flat(1.0 - u)
    return a / (a + b)


def reflection_coefficients(terms: int) -> np.ndarray:
    """c_j with sum_j c_j (-j)^i = 1 for i < terms, so that
    E(T + tau) = sum_j c_j u(T - j tau) matches u and its first terms - 1
    derivatives at T.

    Example:
        >>> np.round(reflection_coefficients(2), 12).tolist()
        [3.0, -2.0]
    """
    j = np.arange(1, terms + 1, dtype=float)
    vandermonde = np.vstack([(-j) ** i for i in range(terms)])
    return np.linalg.solve(vandermonde, np.ones(terms))


def extend_time_series(w: np.ndarray, order: float) -> np.ndarray:
    """Extend a series on [0, T] (time axis first) past T and pad it with zeros.

    The extension matches ceil(order) derivatives at T and is faded out by a
    C-infinity cutoff, then as many zeros follow as there are samples. The
    DFT of the result sees no jump at T, so its H^order norm stays bounded
    under refinement whenever the series is smooth up to T.
    """
    n = w.shape[0]
    terms = int(np.ceil(order)) + 1
    length = (n - 1) // terms
    pieces = [w]
    if length >= 2:
        coeffs = reflection_coefficients(terms)
        k = np.arange(1, length)
        fade = 1.0 - _analytic_step(k / length)
        tail = sum(c * w[n - 1 - (j + 1) * k] for j, c in enumerate(coeffs))
        pieces.append(tail * fade.reshape((-1,) + (1,) * (w.ndim - 1)))
    pieces.append(np.zeros((n,) + w.shape[1:]))
    return np.concatenate(pieces)


def boundary_fractional_norm(w: np.ndarray, grid: Grid, order: float, dt: Optional[float] = None) -> float:
    """H^order norm of boundary data by DFT over the tangential torus (and time).

    Args:
        w: (..., *boundary_shape); with ``dt`` the leading axis is time and
            any axes between time and the tangential axes are components
        grid: Grid
        order: Sobolev order (typically m + 1/2)
        dt: Sampling step of the time axis, None for a single time level

    Example:
        >>> grid = Grid(dim=2, n1=8, n_tan=16)
        >>> x = grid.boundary_coordinates()[0]
        >>> ratio = boundary_fractional_norm(np.sin(2 * np.pi * x), grid, 0.5) / boundary_fractional_norm(
        ...     np.sin(2 * np.pi * x), grid, 0.0)
        >>> bool(abs(ratio - (1 + 4 * np.pi ** 2) ** 0.25) < 1e-12)
        True
    """
    w = np.asarray(w, dtype=float)
    nt = grid.dim - 1
    if dt is None:
        axes = tuple(range(w.ndim - nt, w.ndim))
        xi2 = _frequency_grid(grid)
        cell = grid.boundary_weight()
        count = grid.n_tan ** nt
    else:
        w = extend_time_series(w, order)
        n_time = w.shape[0]
        w = np.moveaxis(w, 0, -nt - 1)
        axes = tuple(range(w.ndim - nt - 1, w.ndim))
        xi2 = _frequency_grid(grid, n_time, dt)
        cell = grid.boundary_weight() * dt
        count = grid.n_tan ** nt * n_time
    spectrum = np.abs(np.fft.fftn(w, axes=axes)) ** 2
    multiplier = (1.0 + 4.0 * np.pi ** 2 * xi2) ** order
    total = pairwise_sum(multiplier * spectrum.reshape((-1,) + xi2.shape))
    return float(np.sqrt(total * cell / count))


def discrete_norms(
    field: np.ndarray,
    stencils: Stencils,
    m: int,
    kind: NormKind = NormKind.FULL,
    history: Optional[TraceHistory] = None,
    dt: Optional[float] = None,
) -> float:
    """Dispatch to the norm of the given kind.

    full / tangential: with ``history`` the time derivatives enter as well,
    otherwise only spatial ones. boundary_fractional: order m + 1/2 of the
    boundary data ``field`` (a time series when ``dt`` is given).
    """
    kind = NormKind(kind)
    if kind is NormKind.BOUNDARY_FRACTIONAL:
        return boundary_fractional_norm(field, stencils.grid, m + 0.5, dt)
    tangential = kind is NormKind.TANGENTIAL
    if history is not None:
        return instant_norm(history, stencils, m, tangential=tangential)
    return sobolev_norm(field, stencils, m, tangential=tangential)
