"""Simulation configuration."""

from dataclasses import dataclass
from typing import Literal, Optional

from ..mixing import MixingSchedule
from ..settings import settings
from .stepsize import tuned_stepsize

Mode = Literal["stochastic", "full_batch"]


@dataclass(frozen=True)
class Stepsize:
    """Constant stepsize, given directly or tuned from (r0, b, e, d)."""

    kind: Literal["constant", "tuned"]
    eta: Optional[float] = None
    r0: float = 0.0
    b: float = 0.0
    e: float = 0.0
    d: float = 0.0

    @classmethod
    def constant(cls, eta: float) -> "Stepsize":
        if eta < 0:
            raise ValueError(f"eta must be >= 0, got: {eta}")
        return cls(kind="constant", eta=eta)

    @classmethod
    def tuned(cls, r0: float, b: float, e: float, d: float) -> "Stepsize":
        return cls(kind="tuned", r0=r0, b=b, e=e, d=d)

    def resolve(self, T: int) -> float:
        """Numeric stepsize for a run of T iterations."""
        if self.kind == "constant":
            return float(self.eta)
        return tuned_stepsize(self.r0, self.b, self.e, self.d, T)


@dataclass
class SimConfig:
    """
    One D-SGD (or centralized) run.

    Attributes:
        T: Iteration count
        stepsize: Constant or tuned stepsize
        schedule: Mixing matrix per iteration (ignored by run_centralized
                  apart from its node count)
        seed: Seed of the per-node sample streams
        record_every: Record spacing; t = 0 and t = T are always recorded
        mode: 'stochastic' draws batch_size fresh samples per node and step,
              'full_batch' uses the expected gradients
        batch_size: Samples per node per step in stochastic mode
        f_star: Overrides the problem's f* for gap reporting
        p: Mixing parameter for the stepsize check; computed from the
           schedule when omitted
    """

    T: int
    stepsize: Stepsize
    schedule: MixingSchedule
    seed: int = 0
    record_every: int = settings.simulation.record_every
    mode: Mode = "stochastic"
    batch_size: int = 1
    f_star: Optional[float] = None
    p: Optional[float] = None

    def __post_init__(self):
        if self.T < 0:
            raise ValueError(f"T must be >= 0, got: {self.T}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got: {self.record_every}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got: {self.seed}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got: {self.batch_size}")
        if self.mode not in ("stochastic", "full_batch"):
            raise ValueError(f"Unknown mode: {self.mode}")

    @property
    def eta(self) -> float:
        return self.stepsize.resolve(self.T)

    def records_at(self, t: int) -> bool:
        return t == 0 or t == self.T or t % self.record_every == 0
