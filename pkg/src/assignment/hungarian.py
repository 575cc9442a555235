"""Hungarian algorithm with row/column potentials, O(n^3)."""

import logging

import numpy as np

from ..errors import NonFiniteCost, NotSquare
from ..mixing import MixingMatrix, validate
from .types import AssignmentResult, Permutation

logger = logging.getLogger(__name__)


def solve_assignment(C: np.ndarray) -> AssignmentResult:
    """
    Minimize sum_i C[i, sigma(i)] over all permutations sigma.

    Shortest augmenting path formulation: rows are inserted one at a time
    and potentials u (rows) / v (columns) keep reduced costs nonnegative.
    Arrays are 1-indexed with column 0 as the virtual source.

    Args:
        C: Dense n x n cost matrix, finite entries

    Returns:
        AssignmentResult whose cost is recomputed from the permutation

    Raises:
        NotSquare: If C is empty or not square
        NonFiniteCost: If C holds NaN or infinity
    """
    cost = np.asarray(C, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1] or cost.shape[0] < 1:
        raise NotSquare(f"Cost matrix must be non-empty and square, got shape {cost.shape}")

    bad = np.argwhere(~np.isfinite(cost))
    if bad.size:
        i, j = (int(x) for x in bad[0])
        raise NonFiniteCost((i, j), float(cost[i, j]))

    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=int)  # p[j] = row matched to column j
    way = np.zeros(n + 1, dtype=int)

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)

        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]

            reduced = cost[i0 - 1] - u[i0] - v[1:]
            improve = free & (reduced < minv[1:])
            minv[1:][improve] = reduced[improve]
            way[1:][improve] = j0

            candidates = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]

            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta

            j0 = j1
            if p[j0] == 0:
                break

        # augment along the alternating path
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    mapping = [0] * n
    for j in range(1, n + 1):
        mapping[p[j] - 1] = j - 1

    permutation = Permutation(mapping=tuple(mapping))
    total = 0.0
    for row, col in enumerate(mapping):
        total += float(cost[row, col])

    logger.debug(f"Assignment solved for n={n}: cost={total:.6e}")
    return AssignmentResult(permutation=permutation, cost=total)


def to_matrix(P: Permutation) -> MixingMatrix:
    """
    Permutation matrix with a single 1 at (i, sigma(i)) in every row.

    Args:
        P: Permutation

    Returns:
        MixingMatrix (validates exactly)
    """
    n = P.n
    entries = np.zeros((n, n))
    entries[np.arange(n), P.as_array()] = 1.0
    return validate(entries, tol=0.0)
