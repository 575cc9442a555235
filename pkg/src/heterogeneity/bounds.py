"""Closed-form upper bounds on neighbourhood heterogeneity."""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatch
from ..mixing import MixingMatrix, frob_dist_to_uniform, mixing_parameter
from ..problems import ClassProportions, ProblemSpec
from ..settings import settings
from ..topo_opt import bias_term
from .estimators import (
    default_probes,
    estimate_class_B,
    estimate_H_detailed,
    estimate_sigma_sq,
    estimate_zeta_bar_sq,
    neighborhood_bias,
)
from .types import HeterogeneityReport, LabelSkewBound

logger = logging.getLogger(__name__)


def variance_term(W: MixingMatrix, sigma_max_sq: float) -> float:
    """(sigma_max^2 / n) ||W - J||_F^2"""
    if sigma_max_sq < 0:
        raise ValueError(f"sigma_max_sq must be >= 0, got: {sigma_max_sq}")
    return sigma_max_sq / W.n * frob_dist_to_uniform(W)


def bias_variance_bound(
    W: MixingMatrix,
    spec: ProblemSpec,
    probes: Sequence[np.ndarray],
    sigma_max_sq: float,
) -> Tuple[float, float]:
    """
    Bias-variance decomposition of H.

    Returns:
        (bias, variance) where bias is the neighbourhood bias of the expected
        gradients maximised over probes and variance is variance_term(W, sigma_max_sq)
    """
    if W.n != spec.n:
        raise DimensionMismatch(f"W has n={W.n}, problem has n={spec.n}")
    return neighborhood_bias(W, spec, probes), variance_term(W, sigma_max_sq)


def prop1_bound(p: float, zeta_bar_sq: float, sigma_bar_sq: float) -> float:
    """(1 - p)(zeta_bar^2 + sigma_bar^2)"""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got: {p}")
    if zeta_bar_sq < 0 or sigma_bar_sq < 0:
        raise ValueError("zeta_bar_sq and sigma_bar_sq must be >= 0")
    return (1.0 - p) * (zeta_bar_sq + sigma_bar_sq)


def label_skew_bound(
    W: MixingMatrix,
    Pi: ClassProportions,
    B: float,
    sigma_max_sq: float,
) -> LabelSkewBound:
    """
    Bound on H for label-skewed nodes sharing per-class distributions.

    bias_bound = (K B / n) sum_k sum_i (sum_j W_ij pi_jk - mean_j pi_jk)^2, which
    is K B times the bias part of the topology learning objective.

    Raises:
        DimensionMismatch: If W and Pi disagree on n
    """
    if not B > 0:
        raise ValueError(f"B must be > 0, got: {B}")
    if W.n != Pi.n:
        raise DimensionMismatch(f"W has n={W.n}, proportions have n={Pi.n}")
    bias_bound = Pi.K * B * bias_term(W, Pi)
    variance_bound = variance_term(W, sigma_max_sq)
    return LabelSkewBound(
        B=B,
        K=Pi.K,
        bias_bound=bias_bound,
        variance_bound=variance_bound,
        total=bias_bound + variance_bound,
    )


def consensus_bound(eta: float, n: int, tau_bar_sq: float, p: float) -> float:
    """Stationary consensus-distance bound 24 eta^2 n tau^2 / p^2."""
    if not p > 0:
        raise ValueError(f"p must be > 0, got: {p}")
    return 24.0 * eta * eta * n * tau_bar_sq / (p * p)


def measure_heterogeneity(
    W: MixingMatrix,
    spec: ProblemSpec,
    probes: Optional[Sequence[np.ndarray]] = None,
    samples: Optional[int] = None,
    seed: int = 0,
    sigma_max_sq: Optional[float] = None,
    estimate_B: bool = False,
) -> HeterogeneityReport:
    """
    Estimate every heterogeneity quantity of one topology on one problem.

    Args:
        W: Mixing matrix
        spec: Problem instance
        probes: Probe points (defaults to default_probes(spec))
        samples: Monte Carlo draws per node per probe
        seed: Stream seed
        sigma_max_sq: Override for the sigma_max^2 used in the variance term;
                      the estimate is reported alongside either way
        estimate_B: Also estimate the class-level constant B (label skew only)

    Returns:
        HeterogeneityReport
    """
    if W.n != spec.n:
        raise DimensionMismatch(f"W has n={W.n}, problem has n={spec.n}")
    samples = settings.estimation.samples if samples is None else samples
    probes = list(probes) if probes else default_probes(spec)
    if not spec.exact:
        logger.warning(
            f"Problem '{spec.kind}' uses surrogate expected gradients; "
            "bias and local heterogeneity carry reference-sample error"
        )

    H = estimate_H_detailed(W, spec, probes, samples=samples, seed=seed)
    noise = estimate_sigma_sq(spec, probes, samples=samples, seed=seed)
    zeta = estimate_zeta_bar_sq(spec, probes)
    sigma_used = noise.sigma_max_sq if sigma_max_sq is None else sigma_max_sq
    bias, variance = bias_variance_bound(W, spec, probes, sigma_used)
    p = mixing_parameter(W)
    B_hat = estimate_class_B(spec, probes) if estimate_B else None

    logger.info(
        f"H_hat={H.value:.6e} (+-{H.stderr:.2e}), bias={bias:.6e}, variance={variance:.6e}, p={p:.6f}"
    )
    return HeterogeneityReport(
        H_hat=H.value,
        H_stderr=H.stderr,
        zeta_bar_sq_hat=zeta,
        sigma_bar_sq_hat=noise.sigma_bar_sq,
        sigma_max_sq_hat=noise.sigma_max_sq,
        sigma_max_sq_used=sigma_used,
        bias_term=bias,
        variance_term=variance,
        p=p,
        tau_bar_sq_prop1=prop1_bound(p, zeta, noise.sigma_bar_sq),
        probe_points=[np.asarray(theta, dtype=float).tolist() for theta in probes],
        samples_per_node=samples,
        oracles_exact=spec.exact,
        B_hat=B_hat,
    )
