"""Assignment result types."""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class Permutation:
    """
    Bijection on {0..n-1}: mapping[i] is the column assigned to row i.

    Serialized forms use 1-based indices (see as_one_based).
    """

    mapping: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.mapping)
        if n < 1:
            raise ValueError("Permutation needs n >= 1")
        if sorted(self.mapping) != list(range(n)):
            raise ValueError(f"Not a bijection on range({n}): {list(self.mapping)}")

    @property
    def n(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(mapping=tuple(range(n)))

    @classmethod
    def from_one_based(cls, sigma: Sequence[int]) -> "Permutation":
        """Build from a 1-based index array such as (2, 3, 1)."""
        return cls(mapping=tuple(int(s) - 1 for s in sigma))

    def as_one_based(self) -> List[int]:
        return [j + 1 for j in self.mapping]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.mapping, dtype=int)


@dataclass(frozen=True)
class AssignmentResult:
    """Optimal permutation with its cost sum_i C[i, sigma(i)]."""

    permutation: Permutation
    cost: float
