"""Heterogeneity result types."""

from dataclasses import dataclass, field
from typing import List, Optional

from pydantic import BaseModel, Field


@dataclass
class MonteCarloEstimate:
    """Estimate with its standard error, maximised over probes."""

    value: float
    stderr: float
    per_probe: List[float] = field(default_factory=list)
    per_probe_stderr: List[float] = field(default_factory=list)


@dataclass
class NoiseEstimate:
    """Per-node gradient noise variances sigma_i^2 (max over probes)."""

    per_node: List[float]
    per_node_stderr: List[float]

    @property
    def sigma_bar_sq(self) -> float:
        return sum(self.per_node) / len(self.per_node)

    @property
    def sigma_max_sq(self) -> float:
        return max(self.per_node)

    @property
    def sigma_bar_sq_stderr(self) -> float:
        return (sum(s * s for s in self.per_node_stderr) ** 0.5) / len(self.per_node)


class HeterogeneityReport(BaseModel):
    """Measured heterogeneity of one topology on one problem."""

    H_hat: float = Field(description="Neighbourhood heterogeneity, max over probes")
    H_stderr: float
    zeta_bar_sq_hat: float = Field(description="Local heterogeneity, max over probes")
    sigma_bar_sq_hat: float
    sigma_max_sq_hat: float
    sigma_max_sq_used: float = Field(description="sigma_max^2 entering variance_term")
    bias_term: float
    variance_term: float
    p: float
    tau_bar_sq_prop1: float = Field(description="(1 - p)(zeta_bar^2 + sigma_bar^2)")
    probe_points: List[List[float]]
    samples_per_node: int
    oracles_exact: bool
    B_hat: Optional[float] = None


class LabelSkewBound(BaseModel):
    """Upper bound on H under label skew: bias_bound + variance_bound."""

    B: float
    K: int
    bias_bound: float
    variance_bound: float
    total: float
