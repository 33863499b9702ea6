"""Small array helpers for component-first fields and batched matrices.

Fields are stored as (n, *grid); dense matrices as (*grid, n, n).
"""

import numpy as np

__all__ = ["matrix_field", "pairwise_sum"]


def matrix_field(M: np.ndarray) -> np.ndarray:
    """(*grid, n, m) -> (n*m, *grid), so stencils can act on every entry."""
    n, m = M.shape[-2:]
    return np.moveaxis(M.reshape(M.shape[:-2] + (n * m,)), -1, 0)


def pairwise_sum(values) -> float:
    """Sum with a fixed pairwise order, independent of worker count."""
    arr = np.ravel(np.asarray(values, dtype=float))
    if arr.size == 0:
        return 0.0
    while arr.size > 1:
        if arr.size % 2:
            arr = np.append(arr, 0.0)
        arr = arr[0::2] + arr[1::2]
    return float(arr[0])
