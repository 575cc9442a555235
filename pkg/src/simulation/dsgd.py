"""
Decentralized SGD simulator.

Every node holds its own parameter vector. One iteration is a local
stochastic gradient step followed by neighbourhood averaging with the
schedule's matrix for that iteration. Both half-steps are synchronous:
averaging reads only the post-gradient values of the previous half-step.

run_centralized shares the gradient and reduction code with run_dsgd, so
a complete-graph run and a centralized run with the same seed produce
identical numbers.
"""

import logging
import time
from dataclasses import replace
from typing import List, Optional

import numpy as np

from ..errors import DimensionMismatch, SamplingFailure
from ..mixing import mix, mixing_parameter, uniform_average
from ..parallel import map_ordered
from ..problems import ProblemSpec, StreamDomain, node_stream
from .config import SimConfig
from .stepsize import check_stepsize
from .trace import SimRecord, SimTrace, TraceCsvWriter

logger = logging.getLogger(__name__)


class _GradientOracle:
    """Per-node gradients at the rows of Theta, one sample stream per node."""

    def __init__(self, spec: ProblemSpec, config: SimConfig):
        self.spec = spec
        self.config = config
        self.rngs = [node_stream(config.seed, StreamDomain.SIMULATION, i) for i in range(spec.n)]

    def __call__(self, Theta: np.ndarray) -> np.ndarray:
        G = np.empty_like(Theta)
        for i, objective in enumerate(self.spec.objectives):
            if self.config.mode == "full_batch":
                G[i] = objective.expected_grad(Theta[i])
                continue
            try:
                batch = objective.sample_many(self.rngs[i], self.config.batch_size)
                G[i] = objective.stoch_grads(Theta[i], batch).mean(axis=0)
            except Exception as e:
                raise SamplingFailure(f"Node {i} failed to sample a gradient: {e}") from e
        return G


class _Recorder:
    """Builds records from the stacked node parameters."""

    def __init__(self, spec: ProblemSpec, config: SimConfig, trace: SimTrace, sink: Optional[TraceCsvWriter]):
        self.spec = spec
        self.config = config
        self.trace = trace
        self.sink = sink
        self.f_star = spec.f_star if config.f_star is None else config.f_star
        self.use_gap_fn = config.f_star is None
        self.started = time.perf_counter_ns()

    def _gap(self, theta: np.ndarray) -> float:
        if self.use_gap_fn:
            return self.spec.gap(theta)
        return self.spec.global_value(theta) - self.f_star

    def __call__(self, t: int, Theta: np.ndarray) -> None:
        theta_bar = uniform_average(Theta)
        deviation = Theta - theta_bar
        node_gap = 0.0
        for i in range(self.spec.n):
            node_gap += self._gap(Theta[i])
        record = SimRecord(
            t=t,
            f_bar_gap=self._gap(theta_bar),
            consensus_sq=float(np.sum(deviation * deviation)),
            mean_iterate=theta_bar,
            node_gap=node_gap / self.spec.n,
            wall_ns=time.perf_counter_ns() - self.started,
        )
        self.trace.append(record)
        if self.sink is not None:
            self.sink.write(record)
        logger.debug(f"t={t} gap={record.f_bar_gap:.6e} consensus={record.consensus_sq:.6e}")


def _initial_state(spec: ProblemSpec, config: SimConfig) -> np.ndarray:
    if config.schedule.n != spec.n:
        raise DimensionMismatch(f"Schedule has n={config.schedule.n}, problem has n={spec.n}")
    theta0 = np.asarray(spec.theta0, dtype=float)
    if theta0.shape != (spec.dim,):
        raise DimensionMismatch(f"theta0 has shape {theta0.shape}, expected ({spec.dim},)")
    return np.tile(theta0, (spec.n, 1))


def _schedule_p(config: SimConfig) -> float:
    if config.p is not None:
        return config.p
    return min(mixing_parameter(W) for W in config.schedule.matrices)


def run_dsgd(spec: ProblemSpec, config: SimConfig, sink: Optional[TraceCsvWriter] = None) -> SimTrace:
    """
    Simulate decentralized SGD.

    Args:
        spec: Problem instance
        config: Run configuration
        sink: Optional CSV writer receiving every record as it is produced

    Returns:
        SimTrace with records at t = 0, every record_every steps and t = T

    Raises:
        DimensionMismatch: If the schedule and problem disagree on n
        ScheduleExhausted: If a sequence schedule is shorter than T
    """
    Theta = _initial_state(spec, config)
    eta = config.eta
    check_stepsize(eta, _schedule_p(config), spec.L)

    trace = SimTrace(algorithm="dsgd", eta=eta, seed=config.seed)
    oracle = _GradientOracle(spec, config)
    record = _Recorder(spec, config, trace, sink)
    record(0, Theta)

    for t in range(config.T):
        W = config.schedule.at(t)
        half = Theta - eta * oracle(Theta)
        Theta = mix(W, half)
        if config.records_at(t + 1):
            record(t + 1, Theta)

    logger.info(
        f"D-SGD finished: T={config.T}, eta={eta:.6g}, final gap={trace.final.f_bar_gap:.6e}, "
        f"consensus={trace.final.consensus_sq:.6e}"
    )
    return trace


def run_centralized(spec: ProblemSpec, config: SimConfig, sink: Optional[TraceCsvWriter] = None) -> SimTrace:
    """
    Simulate centralized parallel SGD with the same sample streams as run_dsgd.

    One shared parameter vector moves along the average of the n per-node
    stochastic gradients. The schedule only fixes n.
    """
    Theta = _initial_state(spec, config)
    eta = config.eta

    trace = SimTrace(algorithm="centralized", eta=eta, seed=config.seed)
    oracle = _GradientOracle(spec, config)
    record = _Recorder(spec, config, trace, sink)
    record(0, Theta)

    for t in range(config.T):
        half = Theta - eta * oracle(Theta)
        Theta = np.tile(uniform_average(half), (spec.n, 1))
        if config.records_at(t + 1):
            record(t + 1, Theta)

    logger.info(f"Centralized SGD finished: T={config.T}, eta={eta:.6g}, final gap={trace.final.f_bar_gap:.6e}")
    return trace


def run_seeds(spec: ProblemSpec, config: SimConfig, seeds: List[int], centralized: bool = False) -> List[SimTrace]:
    """Run one configuration over several seeds, in seed order."""
    runner = run_centralized if centralized else run_dsgd
    spec.get_optimum()
    return map_ordered(lambda s: runner(spec, replace(config, seed=s)), seeds)
