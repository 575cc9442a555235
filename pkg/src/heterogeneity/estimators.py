"""
Monte Carlo estimators of neighbourhood heterogeneity and gradient noise.

Every (node, probe) pair draws from its own counter-based stream keyed by
(seed, node stream id, probe index), and probes are reduced in input
order, so results do not depend on the thread count.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import SamplingFailure
from ..mixing import MixingMatrix, mix, uniform_average
from ..parallel import map_ordered
from ..problems import ProblemSpec, StreamDomain, node_stream
from ..settings import settings
from .types import MonteCarloEstimate, NoiseEstimate

logger = logging.getLogger(__name__)


def _stream_ids(spec: ProblemSpec, stream_ids: Optional[Sequence[int]]) -> List[int]:
    if stream_ids is None:
        return list(range(spec.n))
    if len(stream_ids) != spec.n:
        raise ValueError(f"Expected {spec.n} stream ids, got {len(stream_ids)}")
    return [int(s) for s in stream_ids]


def _draw_grads(spec: ProblemSpec, node: int, rng: np.random.Generator, theta: np.ndarray, size: int):
    objective = spec.objectives[node]
    try:
        batch = objective.sample_many(rng, size)
        grads = objective.stoch_grads(theta, batch)
    except Exception as e:
        raise SamplingFailure(f"Node {node} failed to sample gradients: {e}") from e
    if not np.all(np.isfinite(grads)):
        raise SamplingFailure(f"Node {node} produced non-finite gradients")
    return grads


def _chunks(total: int, chunk: int) -> List[int]:
    sizes = [chunk] * (total // chunk)
    if total % chunk:
        sizes.append(total % chunk)
    return sizes


def _mean_and_stderr(total: float, total_sq: float, count: int) -> Tuple[float, float]:
    mean = total / count
    if count < 2:
        return mean, 0.0
    var = max(total_sq - count * mean * mean, 0.0) / (count - 1)
    return mean, float(np.sqrt(var / count))


def _H_at_probe(
    W: MixingMatrix,
    spec: ProblemSpec,
    theta: np.ndarray,
    probe_index: int,
    samples: int,
    seed: int,
    ids: List[int],
) -> Tuple[float, float]:
    rngs = [node_stream(seed, StreamDomain.ESTIMATION, ids[j], probe_index) for j in range(spec.n)]
    total = 0.0
    total_sq = 0.0
    for size in _chunks(samples, settings.estimation.chunk_size):
        G = np.stack([_draw_grads(spec, j, rngs[j], theta, size) for j in range(spec.n)])
        deviation = mix(W, G) - uniform_average(G)
        # (1/n) sum_i ||.||^2 for every joint draw
        per_draw = np.einsum("isd,isd->s", deviation, deviation) / spec.n
        total += float(per_draw.sum())
        total_sq += float(per_draw @ per_draw)
    return _mean_and_stderr(total, total_sq, samples)


def estimate_H_detailed(
    W: MixingMatrix,
    spec: ProblemSpec,
    probes: Sequence[np.ndarray],
    samples: Optional[int] = None,
    seed: int = 0,
    stream_ids: Optional[Sequence[int]] = None,
) -> MonteCarloEstimate:
    """
    Neighbourhood heterogeneity with standard errors.

    For each probe theta, averages over joint draws (Z_1..Z_n) of
    (1/n) sum_i ||sum_j W_ij grad F_j(theta, Z_j) - (1/n) sum_j grad F_j(theta, Z_j)||^2,
    then reports the maximum over probes.

    Args:
        W: Mixing matrix
        spec: Problem whose objectives supply the gradient oracles
        probes: Parameter vectors to evaluate at
        samples: Joint draws per probe (defaults to settings)
        seed: Stream seed
        stream_ids: Stream id per node (defaults to the node index); permuting
                    nodes together with their ids reproduces the same draws

    Returns:
        MonteCarloEstimate

    Raises:
        SamplingFailure: If an objective oracle fails
    """
    samples = settings.estimation.samples if samples is None else samples
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got: {samples}")
    if not probes:
        raise ValueError("At least one probe point is required")
    if W.n != spec.n:
        raise ValueError(f"W has n={W.n}, problem has n={spec.n}")

    ids = _stream_ids(spec, stream_ids)
    results = map_ordered(
        lambda item: _H_at_probe(W, spec, np.asarray(item[1], dtype=float), item[0], samples, seed, ids),
        list(enumerate(probes)),
    )
    values = [r[0] for r in results]
    errors = [r[1] for r in results]
    best = int(np.argmax(values))
    logger.debug(f"H estimate over {len(probes)} probes: {values[best]:.6e} +- {errors[best]:.2e}")
    return MonteCarloEstimate(value=values[best], stderr=errors[best], per_probe=values, per_probe_stderr=errors)


def estimate_H(
    W: MixingMatrix,
    spec: ProblemSpec,
    probes: Sequence[np.ndarray],
    samples: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Monte Carlo neighbourhood heterogeneity, maximised over probes."""
    return estimate_H_detailed(W, spec, probes, samples=samples, seed=seed).value


def estimate_zeta_bar_sq(spec: ProblemSpec, probes: Sequence[np.ndarray]) -> float:
    """
    Local heterogeneity: max over probes of (1/n) sum_i ||grad f_i - grad f||^2.

    Uses the objectives' expected gradients (a fixed-sample surrogate when
    spec.exact is False).
    """
    if not probes:
        raise ValueError("At least one probe point is required")
    best = 0.0
    for theta in probes:
        grads = spec.node_grads(np.asarray(theta, dtype=float))
        deviation = grads - uniform_average(grads)
        best = max(best, float(np.sum(deviation * deviation)) / spec.n)
    return best


def neighborhood_bias(W: MixingMatrix, spec: ProblemSpec, probes: Sequence[np.ndarray]) -> float:
    """Max over probes of (1/n) sum_i ||sum_j W_ij grad f_j - grad f||^2."""
    if not probes:
        raise ValueError("At least one probe point is required")
    best = 0.0
    for theta in probes:
        grads = spec.node_grads(np.asarray(theta, dtype=float))
        deviation = mix(W, grads) - uniform_average(grads)
        best = max(best, float(np.sum(deviation * deviation)) / spec.n)
    return best


def _noise_at_probe(
    spec: ProblemSpec,
    theta: np.ndarray,
    probe_index: int,
    samples: int,
    seed: int,
    ids: List[int],
) -> List[Tuple[float, float]]:
    out = []
    for j in range(spec.n):
        rng = node_stream(seed, StreamDomain.ESTIMATION, ids[j], probe_index)
        # shifting by the expected gradient keeps the variance sum well conditioned
        center = spec.objectives[j].expected_grad(theta)
        sum_vec = np.zeros(spec.dim)
        sum_sq = 0.0
        sum_quad = 0.0
        for size in _chunks(samples, settings.estimation.chunk_size):
            shifted = _draw_grads(spec, j, rng, theta, size) - center
            norms = np.einsum("sd,sd->s", shifted, shifted)
            sum_vec += shifted.sum(axis=0)
            sum_sq += float(norms.sum())
            sum_quad += float(norms @ norms)
        if samples < 2:
            out.append((0.0, 0.0))
            continue
        variance = max(sum_sq - float(sum_vec @ sum_vec) / samples, 0.0) / (samples - 1)
        _, stderr = _mean_and_stderr(sum_sq, sum_quad, samples)
        out.append((variance, stderr))
    return out


def estimate_sigma_sq(
    spec: ProblemSpec,
    probes: Sequence[np.ndarray],
    samples: Optional[int] = None,
    seed: int = 0,
    stream_ids: Optional[Sequence[int]] = None,
) -> NoiseEstimate:
    """
    Per-node gradient noise E||grad F_i(theta, Z) - grad f_i(theta)||^2.

    Unbiased sample variance per node and probe, maximised over probes.
    """
    samples = settings.estimation.samples if samples is None else samples
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got: {samples}")
    if not probes:
        raise ValueError("At least one probe point is required")

    ids = _stream_ids(spec, stream_ids)
    per_probe = map_ordered(
        lambda item: _noise_at_probe(spec, np.asarray(item[1], dtype=float), item[0], samples, seed, ids),
        list(enumerate(probes)),
    )
    per_node = []
    per_node_stderr = []
    for j in range(spec.n):
        values = [probe[j] for probe in per_probe]
        best = max(values, key=lambda v: v[0])
        per_node.append(best[0])
        per_node_stderr.append(best[1])
    return NoiseEstimate(per_node=per_node, per_node_stderr=per_node_stderr)


def estimate_class_B(spec: ProblemSpec, probes: Sequence[np.ndarray]) -> float:
    """
    Probe estimate of the class-level heterogeneity constant B.

    max over probes and classes of ||E[grad F | Y = k] - (1/K) sum_k' E[grad F | Y = k']||^2
    """
    if not probes:
        raise ValueError("At least one probe point is required")
    best = 0.0
    for theta in probes:
        grads = spec.class_grads(np.asarray(theta, dtype=float))
        deviation = grads - grads.mean(axis=0)
        best = max(best, float(np.max(np.einsum("kd,kd->k", deviation, deviation))))
    return best


def default_probes(
    spec: ProblemSpec,
    trajectory: Optional[Sequence[np.ndarray]] = None,
    count: int = 8,
) -> List[np.ndarray]:
    """
    theta0, theta*, and `count` points along a trajectory.

    Without a recorded trajectory the points are spaced evenly on the
    segment from theta0 to theta*.
    """
    theta0 = np.asarray(spec.theta0, dtype=float)
    theta_star = np.asarray(spec.theta_star, dtype=float)
    probes = [theta0, theta_star]
    if trajectory:
        idx = np.linspace(0, len(trajectory) - 1, num=min(count, len(trajectory))).round().astype(int)
        probes.extend(np.asarray(trajectory[i], dtype=float) for i in idx)
    else:
        for t in np.linspace(0.0, 1.0, num=count + 2)[1:-1]:
            probes.append(theta0 + t * (theta_star - theta0))
    return probes
