"""Problem specification shared by the estimators and the simulator."""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .base import LocalObjective
from .proportions import ClassProportions

logger = logging.getLogger(__name__)


@dataclass
class OptimumInfo:
    """Global minimiser theta* and value f*, with how they were obtained."""

    theta_star: np.ndarray
    f_star: float
    recipe: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ProblemSpec:
    """
    A distributed problem: one LocalObjective per node plus global facts.

    The global objective is f = (1/n) sum_i f_i. When the optimum has no
    closed form, `solver` computes it on first access and the result is
    cached on the instance.
    """

    kind: str
    n: int
    dim: int
    objectives: List[LocalObjective]
    theta0: np.ndarray
    L: float
    seed: int = 0
    params: Dict[str, Any] = field(default_factory=dict)
    proportions: Optional[ClassProportions] = None
    sigma_sq: Optional[List[float]] = None
    optimum: Optional[OptimumInfo] = None
    solver: Optional[Callable[[], OptimumInfo]] = None
    global_value_fn: Optional[Callable[[np.ndarray], float]] = None
    global_grad_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    gap_fn: Optional[Callable[[np.ndarray], float]] = None
    class_grads_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if len(self.objectives) != self.n:
            raise ValueError(f"Expected {self.n} objectives, got {len(self.objectives)}")

    @property
    def exact(self) -> bool:
        """True when every node's expected oracles are exact."""
        return all(o.exact for o in self.objectives)

    @property
    def deterministic(self) -> bool:
        return all(o.deterministic for o in self.objectives)

    def get_optimum(self) -> OptimumInfo:
        """Return theta*, f*; computed once via `solver` when not known in closed form."""
        if self.optimum is None:
            if self.solver is None:
                raise ValueError(f"No optimum known for problem kind '{self.kind}'")
            logger.info(f"Computing reference optimum for {self.kind} (n={self.n})")
            self.optimum = self.solver()
        return self.optimum

    @property
    def theta_star(self) -> np.ndarray:
        return self.get_optimum().theta_star

    @property
    def f_star(self) -> float:
        return self.get_optimum().f_star

    def global_value(self, theta: np.ndarray) -> float:
        """f(theta) = (1/n) sum_i f_i(theta), summed in node order."""
        if self.global_value_fn is not None:
            return self.global_value_fn(theta)
        total = 0.0
        for objective in self.objectives:
            total += objective.expected_value(theta)
        return total / self.n

    def global_grad(self, theta: np.ndarray) -> np.ndarray:
        """grad f(theta), summed in node order."""
        if self.global_grad_fn is not None:
            return self.global_grad_fn(theta)
        total = np.zeros(self.dim)
        for objective in self.objectives:
            total = total + objective.expected_grad(theta)
        return total / self.n

    def gap(self, theta: np.ndarray) -> float:
        """f(theta) - f*."""
        if self.gap_fn is not None:
            return self.gap_fn(theta)
        return self.global_value(theta) - self.f_star

    def node_grads(self, theta: np.ndarray) -> np.ndarray:
        """Expected gradients of every node at a common theta, shape (n, d)."""
        return np.stack([o.expected_grad(theta) for o in self.objectives])

    def permuted(self, order: List[int]) -> "ProblemSpec":
        """Relabel nodes: new node i is old node order[i]."""
        return ProblemSpec(
            kind=self.kind,
            n=self.n,
            dim=self.dim,
            objectives=[self.objectives[j] for j in order],
            theta0=self.theta0,
            L=self.L,
            seed=self.seed,
            params=dict(self.params),
            proportions=self.proportions.permuted(order) if self.proportions is not None else None,
            sigma_sq=[self.sigma_sq[j] for j in order] if self.sigma_sq is not None else None,
            optimum=self.optimum,
            solver=self.solver,
            global_value_fn=self.global_value_fn,
            global_grad_fn=self.global_grad_fn,
            gap_fn=self.gap_fn,
            class_grads_fn=self.class_grads_fn,
        )

    def class_grads(self, theta: np.ndarray) -> np.ndarray:
        """
        Conditional expected gradients E[grad F | Y = k], shape (K, d).

        Raises:
            ValueError: If the problem has no class structure
        """
        if self.class_grads_fn is None:
            raise ValueError(f"Problem kind '{self.kind}' has no class-conditional gradients")
        return self.class_grads_fn(theta)
