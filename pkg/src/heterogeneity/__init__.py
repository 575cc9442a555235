"""Estimators and bounds for neighbourhood and local heterogeneity."""

from .types import HeterogeneityReport, LabelSkewBound, MonteCarloEstimate, NoiseEstimate
from .estimators import (
    estimate_H,
    estimate_H_detailed,
    estimate_zeta_bar_sq,
    estimate_sigma_sq,
    estimate_class_B,
    neighborhood_bias,
    default_probes,
)
from .bounds import (
    bias_variance_bound,
    variance_term,
    prop1_bound,
    label_skew_bound,
    consensus_bound,
    measure_heterogeneity,
)

__all__ = [
    "HeterogeneityReport",
    "LabelSkewBound",
    "MonteCarloEstimate",
    "NoiseEstimate",
    "estimate_H",
    "estimate_H_detailed",
    "estimate_zeta_bar_sq",
    "estimate_sigma_sq",
    "estimate_class_B",
    "neighborhood_bias",
    "default_probes",
    "bias_variance_bound",
    "variance_term",
    "prop1_bound",
    "label_skew_bound",
    "consensus_bound",
    "measure_heterogeneity",
]
