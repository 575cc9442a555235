"""Doubly stochastic mixing matrices: validation and structural queries."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import ColSumViolation, NegativeEntry, NotSquare, RowSumViolation
from ..settings import settings

logger = logging.getLogger(__name__)

# Slack on the [0, 1] entry bounds.
BOUND_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MixingMatrix:
    """
    Validated n x n doubly stochastic matrix.

    Instances are immutable: the stored array is a private read-only copy,
    so a matrix can be shared across threads.
    """

    entries: np.ndarray

    @property
    def n(self) -> int:
        """Node count."""
        return int(self.entries.shape[0])

    def permuted(self, order: Sequence[int]) -> "MixingMatrix":
        """
        Relabel nodes: new node i is old node order[i].

        Args:
            order: Permutation of range(n)

        Returns:
            MixingMatrix with rows and columns permuted simultaneously
        """
        idx = np.asarray(order, dtype=int)
        if sorted(idx.tolist()) != list(range(self.n)):
            raise ValueError(f"order must be a permutation of range({self.n})")
        return _wrap(self.entries[np.ix_(idx, idx)])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class DegreeReport:
    """Communication load of a topology (self-loops counted in d_in_max / d_out_max)."""

    d_in_max: int
    d_out_max: int
    edge_count: int
    max_in_neighbors: int
    max_out_neighbors: int


def _wrap(entries: np.ndarray) -> MixingMatrix:
    frozen = np.array(entries, dtype=float, copy=True)
    frozen.setflags(write=False)
    return MixingMatrix(entries=frozen)


def validate(
    entries: Union[np.ndarray, Sequence[Sequence[float]]],
    tol: Optional[float] = None,
) -> MixingMatrix:
    """
    Check that an array is doubly stochastic and wrap it.

    Args:
        entries: n x n real array
        tol: Absolute tolerance on row/column sums (defaults to settings)

    Returns:
        MixingMatrix

    Raises:
        NotSquare: If the array is empty or not square
        NegativeEntry: If an entry lies outside [0, 1]
        RowSumViolation: If a row does not sum to 1 within tol
        ColSumViolation: If a column does not sum to 1 within tol
    """
    if tol is None:
        tol = settings.mixing.validation_tol

    array = np.asarray(entries, dtype=float)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
        raise NotSquare(f"Expected a non-empty square matrix, got shape {array.shape}")

    bad = np.argwhere(~((array >= -BOUND_TOL) & (array <= 1.0 + BOUND_TOL)))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise NegativeEntry((i, j), float(array[i, j]))

    row_residual = array.sum(axis=1) - 1.0
    worst_row = int(np.argmax(np.abs(row_residual)))
    if abs(row_residual[worst_row]) > tol:
        raise RowSumViolation(worst_row, float(row_residual[worst_row]))

    col_residual = array.sum(axis=0) - 1.0
    worst_col = int(np.argmax(np.abs(col_residual)))
    if abs(col_residual[worst_col]) > tol:
        raise ColSumViolation(worst_col, float(col_residual[worst_col]))

    return _wrap(array)


def as_array(W: Union[MixingMatrix, np.ndarray]) -> np.ndarray:
    """Return the raw float array behind a MixingMatrix or array-like."""
    if isinstance(W, MixingMatrix):
        return W.entries
    return np.asarray(W, dtype=float)


def frob_dist_to_uniform(W: Union[MixingMatrix, np.ndarray]) -> float:
    """
    Squared Frobenius distance to the uniform matrix (1/n) 11^T.

    Args:
        W: Mixing matrix

    Returns:
        sum_ij (W_ij - 1/n)^2
    """
    array = as_array(W)
    n = array.shape[0]
    return float(np.sum((array - 1.0 / n) ** 2))


def degrees(W: MixingMatrix) -> DegreeReport:
    """
    Count incoming and outgoing edges per node.

    An edge j -> i exists when W_ij > 0 exactly; no epsilon threshold.

    Args:
        W: Mixing matrix

    Returns:
        DegreeReport with the maximum in/out loads
    """
    support = as_array(W) > 0
    off_diagonal = support & ~np.eye(support.shape[0], dtype=bool)
    return DegreeReport(
        d_in_max=int(support.sum(axis=0).max()),
        d_out_max=int(support.sum(axis=1).max()),
        edge_count=int(off_diagonal.sum()),
        max_in_neighbors=int(off_diagonal.sum(axis=0).max()),
        max_out_neighbors=int(off_diagonal.sum(axis=1).max()),
    )
