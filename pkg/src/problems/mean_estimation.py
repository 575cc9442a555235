"""Two-cluster mean estimation: F_i(theta, Z) = ||theta - Z||^2."""

import logging
from typing import Optional

import numpy as np

from ..errors import OddN
from .base import LocalObjective
from .spec import OptimumInfo, ProblemSpec

logger = logging.getLogger(__name__)


class MeanEstimationObjective(LocalObjective):
    """Node whose samples are Normal(center, sigma_tilde_sq * I_d)."""

    exact = True

    def __init__(self, center: np.ndarray, sigma_tilde_sq: float):
        if sigma_tilde_sq < 0:
            raise ValueError(f"sigma_tilde_sq must be >= 0, got: {sigma_tilde_sq}")
        self.center = np.asarray(center, dtype=float)
        self.sigma_tilde_sq = float(sigma_tilde_sq)
        self._scale = float(np.sqrt(sigma_tilde_sq))

    @property
    def dim(self) -> int:
        return int(self.center.shape[0])

    @property
    def deterministic(self) -> bool:
        return self.sigma_tilde_sq == 0.0

    @property
    def noise_variance(self) -> float:
        """E||grad F - grad f||^2 = 4 sigma_tilde_sq d."""
        return 4.0 * self.sigma_tilde_sq * self.dim

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.center + self._scale * rng.standard_normal(self.dim)

    def sample_many(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.center + self._scale * rng.standard_normal((size, self.dim))

    def stoch_grad(self, theta: np.ndarray, z: np.ndarray) -> np.ndarray:
        return 2.0 * (theta - z)

    def stoch_grads(self, theta: np.ndarray, batch: np.ndarray) -> np.ndarray:
        return 2.0 * (theta - batch)

    def expected_grad(self, theta: np.ndarray) -> np.ndarray:
        return 2.0 * (theta - self.center)

    def expected_value(self, theta: np.ndarray) -> float:
        diff = theta - self.center
        return float(diff @ diff) + self.sigma_tilde_sq * self.dim


def make_mean_estimation(
    n: int,
    m: float,
    sigma_tilde_sq: float,
    dim: int = 1,
    theta0: Optional[float] = None,
    seed: int = 0,
) -> ProblemSpec:
    """
    Build the two-cluster mean estimation problem.

    Odd nodes (i % 2 == 1) sample around +m, even nodes around -m, so the
    global optimum is theta* = 0 with f(theta) - f* = ||theta||^2.

    Args:
        n: Even node count
        m: Cluster offset
        sigma_tilde_sq: Per-coordinate sample variance
        dim: Parameter dimension
        theta0: Initial value for every coordinate (default 1.0)
        seed: Experiment seed carried by the spec

    Returns:
        ProblemSpec

    Raises:
        OddN: If n is odd
    """
    if n < 2 or n % 2:
        raise OddN(f"mean_estimation needs an even node count >= 2, got n={n}")
    if sigma_tilde_sq < 0:
        raise ValueError(f"sigma_tilde_sq must be >= 0, got: {sigma_tilde_sq}")

    objectives = []
    for i in range(n):
        sign = 1.0 if i % 2 == 1 else -1.0
        objectives.append(MeanEstimationObjective(np.full(dim, sign * m), sigma_tilde_sq))

    theta_star = np.zeros(dim)
    f_star = m * m * dim + sigma_tilde_sq * dim
    start = 1.0 if theta0 is None else float(theta0)

    logger.debug(f"Mean estimation: n={n}, m={m}, sigma_tilde_sq={sigma_tilde_sq}, d={dim}")
    return ProblemSpec(
        kind="mean_estimation",
        n=n,
        dim=dim,
        objectives=objectives,
        theta0=np.full(dim, start),
        L=2.0,
        seed=seed,
        params={"m": m, "sigma_tilde_sq": sigma_tilde_sq, "dim": dim, "theta0": start},
        sigma_sq=[o.noise_variance for o in objectives],
        optimum=OptimumInfo(
            theta_star=theta_star,
            f_star=f_star,
            recipe={"method": "closed_form"},
        ),
        global_value_fn=lambda theta: float(theta @ theta) + f_star,
        gap_fn=lambda theta: float(theta @ theta),
    )
