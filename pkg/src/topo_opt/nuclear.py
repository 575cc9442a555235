"""Nuclear norm via one-sided Jacobi rotations."""

import logging
from typing import Optional

import numpy as np

from ..errors import NoConvergence
from ..settings import settings

logger = logging.getLogger(__name__)

MAX_SWEEPS = 60
NEGLIGIBLE_COLUMN = 1e-12


def singular_values(M: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """
    Singular values of a real matrix by Hestenes (one-sided) Jacobi.

    Column pairs are rotated until mutually orthogonal; the singular values
    are then the column norms. Equivalent to a Jacobi eigensolve of M^T M
    without forming the product, so small singular values keep full accuracy.

    Args:
        M: Real m x n array
        tol: Relative orthogonality threshold (defaults to settings)

    Returns:
        Singular values, descending

    Raises:
        NoConvergence: If a sweep limit is reached
    """
    tol = settings.topology.jacobi_tol if tol is None else tol
    U = np.array(M, dtype=float, copy=True)
    cols = U.shape[1]
    # columns this small relative to ||M||_F count as zero
    floor = (NEGLIGIBLE_COLUMN * float(np.linalg.norm(U))) ** 2

    for sweep in range(1, MAX_SWEEPS + 1):
        rotated = False
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                alpha = float(U[:, p] @ U[:, p])
                beta = float(U[:, q] @ U[:, q])
                gamma = float(U[:, p] @ U[:, q])
                if min(alpha, beta) <= floor or abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                col_p = U[:, p].copy()
                U[:, p] = c * col_p - s * U[:, q]
                U[:, q] = s * col_p + c * U[:, q]
        if not rotated:
            logger.debug(f"Jacobi converged after {sweep} sweeps")
            return np.sort(np.linalg.norm(U, axis=0))[::-1]

    raise NoConvergence(f"One-sided Jacobi did not converge in {MAX_SWEEPS} sweeps", last_iterate=U)


def nuclear_norm(M: np.ndarray, tol: Optional[float] = None) -> float:
    """Sum of singular values."""
    return float(np.sum(singular_values(M, tol=tol)))
