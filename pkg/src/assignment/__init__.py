"""Linear assignment for the Frank-Wolfe linear minimization step."""

from .types import Permutation, AssignmentResult
from .hungarian import solve_assignment, to_matrix

__all__ = [
    "Permutation",
    "AssignmentResult",
    "solve_assignment",
    "to_matrix",
]
