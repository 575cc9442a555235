"""Per-node stochastic objective interface."""

from abc import ABC, abstractmethod
from enum import IntEnum
from typing import Any

import numpy as np


class StreamDomain(IntEnum):
    """Separates the random streams of different consumers under one seed."""

    SIMULATION = 1
    ESTIMATION = 2
    REFERENCE = 3
    DATASET = 4
    PROBES = 5


def node_stream(seed: int, domain: StreamDomain, node: int, index: int = 0) -> np.random.Generator:
    """
    Independent random stream keyed by (seed, domain, node, index).

    Counter-based (Philox), so a stream depends only on its key and never on
    how many other streams were created or in which order. Keys always have
    four words; SeedSequence pads shorter entropy with zeros.
    """
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got: {seed}")
    entropy = [int(seed), int(domain), int(node), int(index)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


class LocalObjective(ABC):
    """
    Stochastic gradient oracle of one node.

    F_i(theta, Z) is the pointwise loss, f_i(theta) = E[F_i(theta, Z)] with
    Z ~ D_i. Subclasses declare whether expected_grad / expected_value are
    exact or a fixed-sample surrogate via the `exact` attribute.
    """

    exact: bool = True

    @property
    @abstractmethod
    def dim(self) -> int:
        """Parameter dimension d."""
        pass

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> Any:
        """Draw one data point Z from the node's distribution."""
        pass

    @abstractmethod
    def stoch_grad(self, theta: np.ndarray, z: Any) -> np.ndarray:
        """Pointwise gradient of F_i at theta."""
        pass

    @abstractmethod
    def expected_grad(self, theta: np.ndarray) -> np.ndarray:
        """Gradient of f_i at theta."""
        pass

    @abstractmethod
    def expected_value(self, theta: np.ndarray) -> float:
        """f_i(theta)."""
        pass

    def sample_many(self, rng: np.random.Generator, size: int) -> Any:
        """Draw a batch of size points; the default is a list of single draws."""
        return [self.sample(rng) for _ in range(size)]

    def stoch_grads(self, theta: np.ndarray, batch: Any) -> np.ndarray:
        """Per-sample gradients for a batch from sample_many, shape (size, d)."""
        return np.stack([self.stoch_grad(theta, z) for z in batch])

    @property
    def deterministic(self) -> bool:
        """True when stoch_grad always equals expected_grad (zero gradient noise)."""
        return False
