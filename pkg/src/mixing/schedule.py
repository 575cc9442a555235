"""Time-varying mixing schedules."""

from dataclasses import dataclass
from typing import Sequence, Tuple

from ..errors import DimensionMismatch, ScheduleExhausted
from .matrix import MixingMatrix

POLICIES = ("fixed", "cyclic", "sequence")


@dataclass(frozen=True)
class MixingSchedule:
    """
    Ordered mixing matrices with a repetition policy.

    Policies:
        fixed: one matrix used at every step
        cyclic: W^(t) = matrices[t mod len]
        sequence: W^(t) = matrices[t]; running past the end raises ScheduleExhausted
    """

    matrices: Tuple[MixingMatrix, ...]
    policy: str = "fixed"

    def __post_init__(self):
        if not self.matrices:
            raise ValueError("MixingSchedule needs at least one matrix")
        if self.policy not in POLICIES:
            raise ValueError(f"Unknown schedule policy: {self.policy}. Available: {', '.join(POLICIES)}")
        if self.policy == "fixed" and len(self.matrices) != 1:
            raise ValueError("fixed schedule takes exactly one matrix")
        sizes = {W.n for W in self.matrices}
        if len(sizes) != 1:
            raise DimensionMismatch(f"Schedule matrices disagree on n: {sorted(sizes)}")

    @classmethod
    def fixed(cls, W: MixingMatrix) -> "MixingSchedule":
        return cls(matrices=(W,), policy="fixed")

    @classmethod
    def cyclic(cls, matrices: Sequence[MixingMatrix]) -> "MixingSchedule":
        return cls(matrices=tuple(matrices), policy="cyclic")

    @classmethod
    def sequence(cls, matrices: Sequence[MixingMatrix]) -> "MixingSchedule":
        return cls(matrices=tuple(matrices), policy="sequence")

    @property
    def n(self) -> int:
        return self.matrices[0].n

    def at(self, t: int) -> MixingMatrix:
        """Mixing matrix used at iteration t (0-based)."""
        if self.policy == "fixed":
            return self.matrices[0]
        if self.policy == "cyclic":
            return self.matrices[t % len(self.matrices)]
        if t >= len(self.matrices):
            raise ScheduleExhausted(
                f"Schedule holds {len(self.matrices)} matrices, iteration {t} requested"
            )
        return self.matrices[t]
