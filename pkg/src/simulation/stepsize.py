"""Stepsize tuning and iteration budgets for D-SGD."""

import logging
import math
from typing import Tuple

from ..errors import NonPositiveD, ZeroP

logger = logging.getLogger(__name__)

# Explicit constants of the iteration budget
NOISE_CONSTANT = 36.0
HETEROGENEITY_CONSTANT = 89.0
SMOOTHNESS_CONSTANT = 24.0


def _check_nonnegative(**values: float) -> None:
    for name, value in values.items():
        if value < 0 or math.isnan(value):
            raise ValueError(f"{name} must be >= 0, got: {value}")


def tuned_stepsize(r0: float, b: float, e: float, d: float, T: int) -> float:
    """
    eta = min{(r0 / (b (T+1)))^(1/2), (r0 / (e (T+1)))^(1/3), 1/d}.

    A zero b or e drops the corresponding term.

    Raises:
        NonPositiveD: If d <= 0
    """
    if not d > 0:
        raise NonPositiveD(f"d must be > 0, got: {d}")
    _check_nonnegative(r0=r0, b=b, e=e)
    if T < 0:
        raise ValueError(f"T must be >= 0, got: {T}")

    candidates = [1.0 / d]
    if b > 0:
        candidates.append(math.sqrt(r0 / (b * (T + 1))))
    if e > 0:
        candidates.append((r0 / (e * (T + 1))) ** (1.0 / 3.0))
    return min(candidates)


def stepsize_objective(eta: float, r0: float, b: float, e: float, T: int) -> float:
    """r0 / (eta (T+1)) + b eta + e eta^2, the quantity the tuned stepsize balances."""
    if not eta > 0:
        raise ValueError(f"eta must be > 0, got: {eta}")
    return r0 / (eta * (T + 1)) + b * eta + e * eta * eta


def rate_bound(r0: float, b: float, e: float, d: float, T: int) -> float:
    """
    Upper bound on stepsize_objective at the tuned stepsize:

    2 (b r0 / (T+1))^(1/2) + 2 e^(1/3) (r0 / (T+1))^(2/3) + d r0 / (T+1)
    """
    if not d > 0:
        raise NonPositiveD(f"d must be > 0, got: {d}")
    _check_nonnegative(r0=r0, b=b, e=e)
    ratio = r0 / (T + 1)
    return 2.0 * math.sqrt(b * ratio) + 2.0 * e ** (1.0 / 3.0) * ratio ** (2.0 / 3.0) + d * ratio


def theorem1_constants(
    sigma_bar_sq: float, tau_bar_sq: float, L: float, p: float, n: int
) -> Tuple[float, float, float]:
    """
    (b, e, d) = (sigma_bar^2 / n, 36 L tau_bar^2 / p^2, 8 L / p).

    Raises:
        ZeroP: If p <= 0
    """
    if not p > 0:
        raise ZeroP(f"Mixing parameter must be > 0, got: {p}")
    _check_nonnegative(sigma_bar_sq=sigma_bar_sq, tau_bar_sq=tau_bar_sq)
    if not L > 0 or n < 1:
        raise ValueError(f"L must be > 0 and n >= 1, got: L={L}, n={n}")
    return sigma_bar_sq / n, 36.0 * L * tau_bar_sq / (p * p), 8.0 * L / p


def iteration_budget(
    epsilon: float,
    r0: float,
    sigma_bar_sq: float,
    tau_bar_sq: float,
    L: float,
    p: float,
    n: int,
) -> int:
    """
    Iterations sufficient for an average gap of epsilon.

    ceil(36 sigma_bar^2 r0 / (n eps^2) + 89 sqrt(L) tau_bar r0 / (p eps^1.5) + 24 L r0 / (p eps))

    Raises:
        ZeroP: If p <= 0
    """
    if not p > 0:
        raise ZeroP(f"Mixing parameter must be > 0, got: {p}")
    if not epsilon > 0 or not L > 0 or n < 1:
        raise ValueError(f"epsilon and L must be > 0 and n >= 1, got: {epsilon}, {L}, {n}")
    _check_nonnegative(r0=r0, sigma_bar_sq=sigma_bar_sq, tau_bar_sq=tau_bar_sq)

    noise = NOISE_CONSTANT * sigma_bar_sq * r0 / (n * epsilon**2)
    heterogeneity = HETEROGENEITY_CONSTANT * math.sqrt(L * tau_bar_sq) * r0 / (p * epsilon**1.5)
    smooth = SMOOTHNESS_CONSTANT * L * r0 / (p * epsilon)
    return int(math.ceil(noise + heterogeneity + smooth))


def max_stable_stepsize(p: float, L: float) -> float:
    """p / (8L)"""
    if not p > 0:
        raise ZeroP(f"Mixing parameter must be > 0, got: {p}")
    return p / (8.0 * L)


def check_stepsize(eta: float, p: float, L: float) -> bool:
    """Warn when eta exceeds p / (8L). Returns True if eta is within the threshold."""
    if p <= 0:
        logger.warning(f"Mixing parameter is {p}; no stepsize satisfies eta <= p/(8L)")
        return False
    limit = max_stable_stepsize(p, L)
    if eta > limit:
        logger.warning(f"Stepsize {eta:.6g} exceeds p/(8L) = {limit:.6g} (p={p:.6g}, L={L:.6g})")
        return False
    return True
