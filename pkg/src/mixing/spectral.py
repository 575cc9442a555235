"""Mixing parameter and spectral gap via power iteration."""

import logging
from typing import Optional, Union

import numpy as np

from ..errors import NoConvergence
from ..settings import settings
from .matrix import MixingMatrix, as_array

logger = logging.getLogger(__name__)

# Fixed start-vector seed; results must not depend on global RNG state.
_START_SEED = 20_231


def _start_vector(n: int) -> np.ndarray:
    rng = np.random.default_rng(_START_SEED)
    x = rng.standard_normal(n)
    x -= x.mean()
    norm = np.linalg.norm(x)
    if norm == 0.0:
        return x
    return x / norm


def top_deflated_eigenvalue(
    A: np.ndarray,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> float:
    """
    Largest eigenvalue of a symmetric PSD matrix restricted to the complement of 1.

    Power iteration from a seeded start vector orthogonal to the all-ones
    vector; the iterate is re-projected every step so rounding cannot
    reintroduce the 1 direction.

    Args:
        A: Symmetric positive semidefinite n x n array with A 1 = 0
        tol: Stop when successive Rayleigh quotients differ by less than tol
        max_iter: Iteration cap

    Returns:
        Top eigenvalue on the subspace orthogonal to 1

    Raises:
        NoConvergence: If the cap is hit
    """
    tol = settings.mixing.power_tol if tol is None else tol
    max_iter = settings.mixing.power_max_iter if max_iter is None else max_iter

    n = A.shape[0]
    if n == 1:
        return 0.0

    x = _start_vector(n)
    rayleigh = float(x @ A @ x)
    for iteration in range(1, max_iter + 1):
        y = A @ x
        y -= y.mean()
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            # A vanishes on the complement of 1
            return 0.0
        x = y / norm
        updated = float(x @ A @ x)
        if abs(updated - rayleigh) < tol:
            logger.debug(f"Power iteration converged after {iteration} steps: {updated:.6e}")
            return max(updated, 0.0)
        rayleigh = updated

    residual = float(np.linalg.norm(A @ x - rayleigh * x))
    raise NoConvergence(
        f"Power iteration did not converge in {max_iter} steps (residual {residual:.3e})",
        last_iterate=x,
        residual=residual,
    )


def mixing_parameter(
    W: Union[MixingMatrix, np.ndarray],
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> float:
    """
    Compute p = 1 - lambda_2(W^T W).

    Args:
        W: Doubly stochastic matrix
        tol: Rayleigh-quotient tolerance (defaults to settings)
        max_iter: Iteration cap (defaults to settings)

    Returns:
        p in [0, 1]
    """
    array = as_array(W)
    n = array.shape[0]
    centered = array - 1.0 / n
    # (W - J)^T (W - J) = W^T W - J for doubly stochastic W
    deflated = centered.T @ centered
    lam2 = top_deflated_eigenvalue(deflated, tol=tol, max_iter=max_iter)
    return float(min(1.0, max(0.0, 1.0 - lam2)))


def spectral_gap(
    W: Union[MixingMatrix, np.ndarray],
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> float:
    """
    Spectral gap 1 - |lambda_2(W)| of a symmetric mixing matrix.

    For symmetric W, p = 1 - (1 - gap)^2.

    Raises:
        ValueError: If W is not symmetric
    """
    array = as_array(W)
    if not np.allclose(array, array.T, atol=1e-12):
        raise ValueError("spectral_gap is defined for symmetric W only")
    p = mixing_parameter(array, tol=tol, max_iter=max_iter)
    return float(1.0 - np.sqrt(max(0.0, 1.0 - p)))
