"""Domain exceptions shared across modules.

All errors derive from ValueError or RuntimeError so callers that only
catch the builtin types keep working.
"""

from typing import Any, Optional, Tuple


class NotSquare(ValueError):
    """Array is not a non-empty square matrix."""


class NegativeEntry(ValueError):
    """Matrix entry outside [0, 1]."""

    def __init__(self, index: Tuple[int, int], value: float):
        self.index = index
        self.value = value
        super().__init__(f"Entry {index} = {value!r} lies outside [0, 1]")


class RowSumViolation(ValueError):
    """Row does not sum to one."""

    def __init__(self, index: int, residual: float):
        self.index = index
        self.residual = residual
        super().__init__(f"Row {index} sums to 1 {residual:+.3e}")


class ColSumViolation(ValueError):
    """Column does not sum to one."""

    def __init__(self, index: int, residual: float):
        self.index = index
        self.residual = residual
        super().__init__(f"Column {index} sums to 1 {residual:+.3e}")


class OddNForAlternatingRing(ValueError):
    """Alternating ring requested for an odd node count."""


class OddN(ValueError):
    """Two-cluster problem requested for an odd node count."""


class NoConvergence(RuntimeError):
    """Iterative solver hit its iteration cap."""

    def __init__(self, message: str, last_iterate: Any = None, residual: Optional[float] = None):
        self.last_iterate = last_iterate
        self.residual = residual
        super().__init__(message)


class NonFiniteCost(ValueError):
    """Cost matrix holds NaN or infinity."""

    def __init__(self, index: Tuple[int, int], value: float):
        self.index = index
        self.value = value
        super().__init__(f"Cost entry {index} is not finite: {value!r}")


class DimensionMismatch(ValueError):
    """Operand shapes do not agree."""


class InvalidBudget(ValueError):
    """Iteration budget or tolerance out of range."""


class SamplingFailure(RuntimeError):
    """An objective oracle failed to produce a sample or gradient."""


class ScheduleExhausted(RuntimeError):
    """A finite mixing schedule ran out of matrices."""


class NonPositiveD(ValueError):
    """Stepsize tuning constant d must be positive."""


class ZeroP(ValueError):
    """Mixing parameter must be strictly positive."""


class ConfigError(ValueError):
    """Experiment configuration is invalid."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# Errors raised by numerical routines; the CLI maps them to one exit code.
NUMERICAL_ERRORS = (
    NoConvergence,
    NonFiniteCost,
    NegativeEntry,
    RowSumViolation,
    ColSumViolation,
    SamplingFailure,
)
