"""Simulation traces: records, CSV sink and post-hoc metrics."""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, List, Optional, Union

import numpy as np

from ..errors import ConfigError
from ..heterogeneity import consensus_bound
from ..mixing.io import format_float

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

METRICS = ("f_bar_gap", "node_gap", "consensus_sq")


@dataclass
class SimRecord:
    """State of a run at iteration t."""

    t: int
    f_bar_gap: float
    consensus_sq: float
    mean_iterate: np.ndarray
    node_gap: float
    wall_ns: int = 0


@dataclass
class SimTrace:
    """Recorded iterations of one run, t strictly increasing."""

    algorithm: str
    eta: float
    seed: int
    records: List[SimRecord] = field(default_factory=list)

    def append(self, record: SimRecord) -> None:
        if self.records and record.t <= self.records[-1].t:
            raise ValueError(f"Record t={record.t} does not follow t={self.records[-1].t}")
        self.records.append(record)

    @property
    def ts(self) -> List[int]:
        return [r.t for r in self.records]

    def series(self, metric: str) -> np.ndarray:
        if metric not in METRICS:
            raise ValueError(f"Unknown metric: {metric}. Available: {', '.join(METRICS)}")
        return np.array([getattr(r, metric) for r in self.records])

    @property
    def final(self) -> SimRecord:
        return self.records[-1]


def csv_header(dim: int) -> str:
    columns = ["t", "f_bar_gap", "consensus_sq"]
    columns += [f"theta_bar_{k}" for k in range(dim)]
    columns.append("node_gap")
    return ",".join(columns)


def record_to_csv(record: SimRecord) -> str:
    cells = [str(record.t), format_float(record.f_bar_gap), format_float(record.consensus_sq)]
    cells += [format_float(v) for v in record.mean_iterate]
    cells.append(format_float(record.node_gap))
    return ",".join(cells)


class TraceCsvWriter:
    """
    Streams records to a CSV file as they are produced.

    Wall-clock times are not written so that reruns produce identical bytes.
    """

    def __init__(self, path: PathLike, dim: int):
        self.path = Path(path)
        self.dim = dim
        self._handle: Optional[IO[str]] = None

    def __enter__(self) -> "TraceCsvWriter":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = open(self.path, "w", encoding="utf-8", newline="\n")
        self._handle.write(csv_header(self.dim) + "\n")
        return self

    def write(self, record: SimRecord) -> None:
        if self._handle is None:
            raise RuntimeError("TraceCsvWriter used outside its context")
        self._handle.write(record_to_csv(record) + "\n")

    def __exit__(self, exc_type, exc, tb) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None
        if exc_type is None:
            logger.debug(f"Wrote trace CSV: {self.path}")


def trace_to_csv(trace: SimTrace) -> str:
    dim = len(trace.records[0].mean_iterate) if trace.records else 0
    lines = [csv_header(dim)] + [record_to_csv(r) for r in trace.records]
    return "\n".join(lines) + "\n"


def write_trace_csv(trace: SimTrace, path: PathLike) -> Path:
    """Write a whole trace at once."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(trace_to_csv(trace), encoding="utf-8")
    logger.debug(f"Wrote trace CSV: {path}")
    return path


def read_trace_csv(path: PathLike, algorithm: str = "unknown", eta: float = float("nan"), seed: int = 0) -> SimTrace:
    """
    Load a trace written by write_trace_csv or TraceCsvWriter.

    Raises:
        ConfigError: If the header or a row is malformed
    """
    path = Path(path)
    lines = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not lines:
        raise ConfigError(str(path), "empty trace")
    header = lines[0].split(",")
    if header[:3] != ["t", "f_bar_gap", "consensus_sq"] or header[-1] != "node_gap":
        raise ConfigError(f"{path}:1", "unexpected trace header")
    dim = len(header) - 4

    trace = SimTrace(algorithm=algorithm, eta=eta, seed=seed)
    for line_no, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise ConfigError(f"{path}:{line_no}", f"expected {len(header)} columns, got {len(cells)}")
        try:
            trace.append(
                SimRecord(
                    t=int(cells[0]),
                    f_bar_gap=float(cells[1]),
                    consensus_sq=float(cells[2]),
                    mean_iterate=np.array([float(c) for c in cells[3 : 3 + dim]]),
                    node_gap=float(cells[-1]),
                )
            )
        except ValueError as e:
            raise ConfigError(f"{path}:{line_no}", str(e))
    return trace


def running_average(trace: SimTrace, metric: str = "node_gap") -> np.ndarray:
    """Average of the metric over all records up to and including each one."""
    values = trace.series(metric)
    return np.cumsum(values) / np.arange(1, len(values) + 1)


def iterations_to_epsilon(trace: SimTrace, epsilon: float, metric: str = "node_gap") -> Optional[int]:
    """
    First recorded t whose running-average metric is <= epsilon.

    Returns:
        The iteration, or None if the run never reaches epsilon
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got: {epsilon}")
    averages = running_average(trace, metric)
    hits = np.nonzero(averages <= epsilon)[0]
    if len(hits) == 0:
        return None
    return trace.records[int(hits[0])].t


def median_iterations(values: List[Optional[int]]) -> float:
    """Median with never-reached runs counted as +inf."""
    if not values:
        raise ValueError("No runs to summarise")
    return float(np.median([math.inf if v is None else float(v) for v in values]))


@dataclass
class ConsensusCheck:
    """Outcome of the soft consensus-distance check."""

    passed: bool
    running_average: float
    bound: float


def consensus_soft_check(
    trace: SimTrace,
    n: int,
    tau_sq: float,
    p: float,
    slack: float = 1.5,
) -> ConsensusCheck:
    """
    Compare the running average of consensus_sq with 24 eta^2 n tau^2 / p^2.

    Violations are logged as warnings, never raised.
    """
    bound = consensus_bound(trace.eta, n, tau_sq, p) * slack
    average = float(np.mean(trace.series("consensus_sq"))) if trace.records else 0.0
    passed = average <= bound
    if not passed:
        logger.warning(
            f"Consensus distance {average:.6e} exceeds bound {bound:.6e} "
            f"({trace.algorithm}, seed={trace.seed})"
        )
    return ConsensusCheck(passed=passed, running_average=average, bound=bound)
