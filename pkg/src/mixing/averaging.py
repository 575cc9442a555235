"""Fixed-order neighbourhood averaging."""

from typing import Union

import numpy as np

from .matrix import MixingMatrix, as_array


def mix(W: Union[MixingMatrix, np.ndarray], X: np.ndarray) -> np.ndarray:
    """
    Row i of the result is sum_j W_ij X[j], accumulated with j ascending.

    The summation order does not depend on W's sparsity or on BLAS, so a
    complete-graph mix is bitwise equal to uniform_average tiled over rows.

    Args:
        W: n x n weights
        X: Array whose leading axis has length n

    Returns:
        Array shaped like X
    """
    weights = as_array(W)
    n = weights.shape[0]
    if X.shape[0] != n:
        raise ValueError(f"Leading axis of X is {X.shape[0]}, expected {n}")
    out = np.zeros_like(X, dtype=float)
    expand = (slice(None),) + (None,) * (X.ndim - 1)
    for j in range(n):
        out += weights[:, j][expand] * X[j]
    return out


def uniform_average(X: np.ndarray) -> np.ndarray:
    """sum_j (1/n) X[j] with j ascending; the same arithmetic as a complete-graph mix row."""
    n = X.shape[0]
    weight = 1.0 / n
    out = np.zeros_like(X[0], dtype=float)
    for j in range(n):
        out += weight * X[j]
    return out
