"""Canonical topology generators."""

import logging
from typing import Callable, Dict, List, Optional

import numpy as np

from ..errors import OddNForAlternatingRing
from .matrix import MixingMatrix, validate

logger = logging.getLogger(__name__)


def _complete(n: int) -> np.ndarray:
    return np.full((n, n), 1.0 / n)


def _identity(n: int) -> np.ndarray:
    return np.eye(n)


def _ring_weights(order: List[int], self_weight: float, neighbor_weight: float) -> np.ndarray:
    """Place nodes on a ring in the given order and connect ring neighbours."""
    n = len(order)
    W = np.zeros((n, n))
    for pos, node in enumerate(order):
        W[node, node] += self_weight
        left = order[(pos - 1) % n]
        right = order[(pos + 1) % n]
        # += so that n = 1 and n = 2 fold onto the same entries
        W[node, left] += neighbor_weight
        W[node, right] += neighbor_weight
    return W


def _alternating_ring(n: int) -> np.ndarray:
    if n % 2:
        raise OddNForAlternatingRing(f"alternating_ring needs an even node count, got n={n}")
    return _ring_weights(list(range(n)), 0.5, 0.25)


def _clustered_ring(n: int) -> np.ndarray:
    if n % 2:
        raise OddNForAlternatingRing(f"clustered_ring needs an even node count, got n={n}")
    order = list(range(1, n, 2)) + list(range(0, n, 2))
    return _ring_weights(order, 0.5, 0.25)


def _ring(n: int) -> np.ndarray:
    if n < 3:
        return _complete(n)
    return _ring_weights(list(range(n)), 1.0 / 3.0, 1.0 / 3.0)


_GENERATORS: Dict[str, Callable[[int], np.ndarray]] = {
    "complete": _complete,
    "identity": _identity,
    "alternating_ring": _alternating_ring,
    "clustered_ring": _clustered_ring,
    "ring": _ring,
}


def list_topologies() -> List[str]:
    """List generator kinds accepted by make_topology."""
    return list(_GENERATORS.keys()) + ["custom_weights"]


def make_topology(
    kind: str,
    n: int,
    weights: Optional[np.ndarray] = None,
) -> MixingMatrix:
    """
    Build a canonical mixing matrix.

    Ring layouts follow index order. In alternating_ring the odd and even
    nodes alternate around the ring; clustered_ring uses the same weights
    but places all odd nodes contiguously, then all even nodes.

    Args:
        kind: 'complete', 'identity', 'alternating_ring', 'clustered_ring',
              'ring' or 'custom_weights'
        n: Node count
        weights: Explicit n x n matrix, required for 'custom_weights'

    Returns:
        MixingMatrix

    Raises:
        OddNForAlternatingRing: If a two-cluster ring is requested for odd n
        ValueError: If kind is unknown or n < 1
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got: {n}")

    if kind == "custom_weights":
        if weights is None:
            raise ValueError("custom_weights requires a weights matrix")
        W = validate(weights)
        if W.n != n:
            raise ValueError(f"custom weights have n={W.n}, expected {n}")
        return W

    if kind not in _GENERATORS:
        available = ", ".join(list_topologies())
        raise ValueError(f"Unknown topology: {kind}. Available: {available}")

    logger.debug(f"Building {kind} topology with n={n}")
    return validate(_GENERATORS[kind](n))
