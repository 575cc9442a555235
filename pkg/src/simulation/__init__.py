"""Decentralized and centralized SGD simulation."""

from .config import SimConfig, Stepsize
from .stepsize import (
    tuned_stepsize,
    stepsize_objective,
    rate_bound,
    theorem1_constants,
    iteration_budget,
    max_stable_stepsize,
    check_stepsize,
)
from .trace import (
    SimRecord,
    SimTrace,
    TraceCsvWriter,
    ConsensusCheck,
    write_trace_csv,
    read_trace_csv,
    trace_to_csv,
    running_average,
    iterations_to_epsilon,
    median_iterations,
    consensus_soft_check,
)
from .dsgd import run_dsgd, run_centralized, run_seeds

__all__ = [
    "SimConfig",
    "Stepsize",
    "tuned_stepsize",
    "stepsize_objective",
    "rate_bound",
    "theorem1_constants",
    "iteration_budget",
    "max_stable_stepsize",
    "check_stepsize",
    "SimRecord",
    "SimTrace",
    "TraceCsvWriter",
    "ConsensusCheck",
    "write_trace_csv",
    "read_trace_csv",
    "trace_to_csv",
    "running_average",
    "iterations_to_epsilon",
    "median_iterations",
    "consensus_soft_check",
    "run_dsgd",
    "run_centralized",
    "run_seeds",
]
