"""Per-node label proportions (label skew)."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import SamplingFailure
from ..mixing.io import array_to_csv, read_array_csv

logger = logging.getLogger(__name__)

ROW_TOL = 1e-9
_MAX_REDRAWS = 100


@dataclass(frozen=True, eq=False)
class ClassProportions:
    """
    Row-stochastic n x K matrix: values[i, k] = P_i(Y = k).
    """

    values: np.ndarray

    def __post_init__(self):
        array = np.array(self.values, dtype=float, copy=True)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError(f"Proportions must be a non-empty n x K array, got shape {array.shape}")
        if np.any(array < 0.0) or np.any(array > 1.0):
            raise ValueError("Proportions must lie in [0, 1]")
        residual = np.abs(array.sum(axis=1) - 1.0)
        worst = int(np.argmax(residual))
        if residual[worst] > ROW_TOL:
            raise ValueError(f"Proportion row {worst} sums to {array[worst].sum():.12f}, expected 1")
        array.setflags(write=False)
        object.__setattr__(self, "values", array)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def K(self) -> int:
        return int(self.values.shape[1])

    def is_homogeneous(self) -> bool:
        return bool(np.all(self.values == self.values[0]))

    def permuted(self, order: Sequence[int]) -> "ClassProportions":
        return ClassProportions(self.values[np.asarray(order, dtype=int)])

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "ClassProportions":
        """Load proportions from a headerless CSV (n rows, K columns)."""
        return cls(read_array_csv(path))

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(array_to_csv(self.values), encoding="utf-8")
        return path


def dirichlet_proportions(n: int, K: int, alpha: float, seed: int) -> ClassProportions:
    """
    Draw every node's label distribution from Dirichlet(alpha * 1_K).

    Small alpha gives strongly skewed rows; rows that come back degenerate
    (NaN after underflow) are redrawn from the same stream.

    Args:
        n: Node count
        K: Class count
        alpha: Concentration, > 0
        seed: Stream seed

    Returns:
        ClassProportions with rows renormalized to sum to 1
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got: {alpha}")
    if n < 1 or K < 1:
        raise ValueError(f"n and K must be >= 1, got n={n}, K={K}")

    rng = np.random.default_rng(seed)
    concentration = np.full(K, float(alpha))
    rows = np.empty((n, K))
    for i in range(n):
        for _ in range(_MAX_REDRAWS):
            row = rng.dirichlet(concentration)
            total = row.sum()
            if np.all(np.isfinite(row)) and total > 0:
                break
        else:
            raise SamplingFailure(f"Dirichlet draw for node {i} stayed degenerate (alpha={alpha})")
        rows[i] = row / total

    logger.debug(f"Drew Dirichlet proportions n={n}, K={K}, alpha={alpha}, seed={seed}")
    return ClassProportions(rows)


def homogeneous_proportions(
    n: int,
    K: int,
    weights: Optional[Sequence[float]] = None,
) -> ClassProportions:
    """Every node shares the same label distribution (uniform unless weights given)."""
    if weights is None:
        row = np.full(K, 1.0 / K)
    else:
        row = np.asarray(weights, dtype=float)
        if row.shape != (K,):
            raise ValueError(f"weights must have length {K}")
        row = row / row.sum()
    return ClassProportions(np.tile(row, (n, 1)))


def one_class_per_node(n: int, K: int) -> ClassProportions:
    """Node i holds only class i mod K."""
    values = np.zeros((n, K))
    values[np.arange(n), np.arange(n) % K] = 1.0
    return ClassProportions(values)
