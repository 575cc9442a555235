"""
Softmax regression under label skew.

All nodes share the class conditionals P(X | Y = k) = Normal(mu_k, I_q) and
the loss; only the label marginals Pi[i] differ. Parameters are flattened
from a K x (q + 1) matrix whose last column is the bias.
"""

import logging
import threading
from typing import Dict, Optional, Tuple

import numpy as np

from ..errors import DimensionMismatch
from .base import LocalObjective, StreamDomain, node_stream
from .proportions import ClassProportions
from .spec import OptimumInfo, ProblemSpec

logger = logging.getLogger(__name__)

Batch = Tuple[np.ndarray, np.ndarray]

DEFAULT_L2 = 1e-3
DEFAULT_REFERENCE_SIZE = 2000
NEWTON_MAX_ITER = 100
NEWTON_GRAD_TOL = 1e-12


def simplex_means(K: int, q: int, class_sep: float) -> np.ndarray:
    """
    Vertices of a regular simplex in R^q with pairwise distance class_sep.

    Raises:
        DimensionMismatch: If q < K - 1
    """
    if q < K - 1:
        raise DimensionMismatch(f"Need q >= K - 1 to place {K} equidistant means, got q={q}")
    centered = np.eye(K) - 1.0 / K
    # rows of centered are pairwise sqrt(2) apart; express them in an orthonormal basis
    U, _, _ = np.linalg.svd(centered)
    coords = centered @ U[:, : K - 1]
    means = np.zeros((K, q))
    means[:, : K - 1] = coords * (class_sep / np.sqrt(2.0))
    return means


class SoftmaxModel:
    """Multinomial logistic loss with an l2 term identical on every node."""

    def __init__(self, K: int, q: int, l2_reg: float = DEFAULT_L2):
        self.K = K
        self.q = q
        self.l2_reg = l2_reg

    @property
    def dim(self) -> int:
        return self.K * (self.q + 1)

    def _probs(self, theta: np.ndarray, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        weights = theta.reshape(self.K, self.q + 1)
        X_aug = np.hstack([X, np.ones((X.shape[0], 1))])
        logits = X_aug @ weights.T
        logits -= logits.max(axis=1, keepdims=True)
        exp = np.exp(logits)
        probs = exp / exp.sum(axis=1, keepdims=True)
        return probs, X_aug

    def per_sample_grads(self, theta: np.ndarray, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Gradients of the pointwise loss (regularizer included), shape (S, d)."""
        probs, X_aug = self._probs(theta, X)
        probs[np.arange(len(Y)), Y] -= 1.0
        grads = probs[:, :, None] * X_aug[:, None, :]
        return grads.reshape(len(Y), self.dim) + self.l2_reg * theta

    def weighted(
        self,
        theta: np.ndarray,
        X: np.ndarray,
        Y: np.ndarray,
        w: np.ndarray,
        hessian: bool = False,
        regularize: bool = True,
    ) -> Tuple[float, np.ndarray, Optional[np.ndarray]]:
        """
        Value, gradient and optionally Hessian of sum_s w_s F(theta; x_s, y_s).

        Weights are expected to sum to one, so the regularizer enters once.
        """
        l2 = self.l2_reg if regularize else 0.0
        probs, X_aug = self._probs(theta, X)
        rows = np.arange(len(Y))
        log_lik = np.log(np.maximum(probs[rows, Y], np.finfo(float).tiny))
        value = -float(w @ log_lik) + 0.5 * l2 * float(theta @ theta)

        residual = probs.copy()
        residual[rows, Y] -= 1.0
        grad = ((residual * w[:, None]).T @ X_aug).reshape(self.dim) + l2 * theta

        H = None
        if hessian:
            curvature = probs[:, :, None] * np.eye(self.K) - probs[:, :, None] * probs[:, None, :]
            outer = X_aug[:, :, None] * X_aug[:, None, :]
            H = np.einsum("s,skl,sab->kalb", w, curvature, outer).reshape(self.dim, self.dim)
            H += l2 * np.eye(self.dim)
        return value, grad, H

    def smoothness(self, second_moment: np.ndarray) -> float:
        """0.5 * lambda_max(E[x x^T]) + l2; softmax curvature is at most 1/2."""
        return 0.5 * float(np.linalg.eigvalsh(second_moment)[-1]) + self.l2_reg


class ClassReference:
    """
    Fixed per-class samples standing in for the class-conditional expectations.

    Class losses and gradients at the most recent parameters are cached, since
    every node mixes the same K class quantities.
    """

    def __init__(self, model: SoftmaxModel, means: np.ndarray, size: int, seed: int):
        self.model = model
        self.size = size
        self.samples = []
        for k in range(model.K):
            rng = node_stream(seed, StreamDomain.REFERENCE, k)
            self.samples.append(means[k] + rng.standard_normal((size, model.q)))
        self.second_moments = []
        for X in self.samples:
            X_aug = np.hstack([X, np.ones((size, 1))])
            self.second_moments.append(X_aug.T @ X_aug / size)
        self._lock = threading.Lock()
        self._cache: Dict[bytes, Tuple[np.ndarray, np.ndarray]] = {}

    def class_terms(self, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Unregularized class losses (K,) and gradients (K, d) at theta."""
        key = theta.tobytes()
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached

        K = self.model.K
        values = np.empty(K)
        grads = np.empty((K, self.model.dim))
        w = np.full(self.size, 1.0 / self.size)
        for k in range(K):
            Y = np.full(self.size, k)
            values[k], grads[k], _ = self.model.weighted(
                theta, self.samples[k], Y, w, regularize=False
            )

        with self._lock:
            if len(self._cache) > 64:
                self._cache.clear()
            self._cache[key] = (values, grads)
        return values, grads

    def pooled(self, class_weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All reference points with per-sample weights summing to sum(class_weights)."""
        X = np.vstack(self.samples)
        Y = np.repeat(np.arange(self.model.K), self.size)
        w = np.repeat(class_weights / self.size, self.size)
        return X, Y, w


class LabelSkewObjective(LocalObjective):
    """Online node: draws Y ~ Categorical(pi), X ~ Normal(mu_Y, I)."""

    exact = False

    def __init__(
        self,
        model: SoftmaxModel,
        means: np.ndarray,
        pi: np.ndarray,
        reference: ClassReference,
    ):
        self.model = model
        self.means = means
        self.pi = np.asarray(pi, dtype=float)
        self.reference = reference

    @property
    def dim(self) -> int:
        return self.model.dim

    def sample(self, rng: np.random.Generator) -> Batch:
        y = int(rng.choice(self.model.K, p=self.pi))
        x = self.means[y] + rng.standard_normal(self.model.q)
        return x, y

    def sample_many(self, rng: np.random.Generator, size: int) -> Batch:
        Y = rng.choice(self.model.K, size=size, p=self.pi)
        X = self.means[Y] + rng.standard_normal((size, self.model.q))
        return X, Y

    def stoch_grad(self, theta: np.ndarray, z: Batch) -> np.ndarray:
        x, y = z
        return self.model.per_sample_grads(theta, x[None, :], np.array([y]))[0]

    def stoch_grads(self, theta: np.ndarray, batch: Batch) -> np.ndarray:
        X, Y = batch
        return self.model.per_sample_grads(theta, X, Y)

    def expected_grad(self, theta: np.ndarray) -> np.ndarray:
        _, grads = self.reference.class_terms(theta)
        return self.pi @ grads + self.model.l2_reg * theta

    def expected_value(self, theta: np.ndarray) -> float:
        values, _ = self.reference.class_terms(theta)
        return float(self.pi @ values) + 0.5 * self.model.l2_reg * float(theta @ theta)

    def smoothness(self) -> float:
        moment = sum(p * M for p, M in zip(self.pi, self.reference.second_moments))
        return self.model.smoothness(moment)


class EmpiricalLabelSkewObjective(LocalObjective):
    """Node holding a finite dataset; Z is a uniformly drawn stored point."""

    exact = True

    def __init__(self, model: SoftmaxModel, X: np.ndarray, Y: np.ndarray):
        self.model = model
        self.X = X
        self.Y = Y
        self._w = np.full(len(Y), 1.0 / len(Y))

    @property
    def dim(self) -> int:
        return self.model.dim

    def sample(self, rng: np.random.Generator) -> Batch:
        idx = int(rng.integers(len(self.Y)))
        return self.X[idx], int(self.Y[idx])

    def sample_many(self, rng: np.random.Generator, size: int) -> Batch:
        idx = rng.integers(len(self.Y), size=size)
        return self.X[idx], self.Y[idx]

    def stoch_grad(self, theta: np.ndarray, z: Batch) -> np.ndarray:
        x, y = z
        return self.model.per_sample_grads(theta, x[None, :], np.array([y]))[0]

    def stoch_grads(self, theta: np.ndarray, batch: Batch) -> np.ndarray:
        X, Y = batch
        return self.model.per_sample_grads(theta, X, Y)

    def expected_grad(self, theta: np.ndarray) -> np.ndarray:
        return self.model.weighted(theta, self.X, self.Y, self._w)[1]

    def expected_value(self, theta: np.ndarray) -> float:
        return self.model.weighted(theta, self.X, self.Y, self._w)[0]

    def smoothness(self) -> float:
        X_aug = np.hstack([self.X, np.ones((len(self.Y), 1))])
        return self.model.smoothness(X_aug.T @ X_aug / len(self.Y))


def _pooled_class_grads(
    model: SoftmaxModel,
    X: np.ndarray,
    Y: np.ndarray,
    theta: np.ndarray,
) -> np.ndarray:
    """Conditional gradients E[grad F | Y = k] over pooled points, zero rows for absent classes."""
    grads = np.zeros((model.K, model.dim))
    for k in range(model.K):
        mask = Y == k
        count = int(mask.sum())
        if count:
            w = np.full(count, 1.0 / count)
            grads[k] = model.weighted(theta, X[mask], Y[mask], w)[1]
    return grads


def _newton_optimum(
    model: SoftmaxModel,
    X: np.ndarray,
    Y: np.ndarray,
    w: np.ndarray,
    recipe: dict,
) -> OptimumInfo:
    """Damped Newton with Armijo backtracking on a weighted full-batch objective."""
    theta = np.zeros(model.dim)
    value, grad, H = model.weighted(theta, X, Y, w, hessian=True)
    iterations = 0
    for _ in range(NEWTON_MAX_ITER):
        if float(np.linalg.norm(grad)) <= NEWTON_GRAD_TOL:
            break
        step = np.linalg.solve(H, grad)
        decrement = float(grad @ step)
        t = 1.0
        while t > 1e-12:
            candidate = theta - t * step
            cand_value = model.weighted(candidate, X, Y, w)[0]
            if cand_value <= value - 0.25 * t * decrement:
                break
            t *= 0.5
        else:
            logger.warning("Newton line search stalled; keeping current iterate")
            break
        theta = candidate
        iterations += 1
        value, grad, H = model.weighted(theta, X, Y, w, hessian=True)

    grad_norm = float(np.linalg.norm(grad))
    logger.info(
        f"Reference optimum: f*={value:.12e} after {iterations} Newton steps (|grad|={grad_norm:.2e})"
    )
    return OptimumInfo(
        theta_star=theta,
        f_star=value,
        recipe={
            **recipe,
            "method": "damped_newton",
            "iterations": iterations,
            "grad_norm": grad_norm,
        },
    )


def make_label_skew(
    n: int,
    K: int,
    q: int,
    Pi: ClassProportions,
    class_sep: float,
    seed: int,
    l2_reg: float = DEFAULT_L2,
    samples_per_node: Optional[int] = None,
    reference_size: int = DEFAULT_REFERENCE_SIZE,
) -> ProblemSpec:
    """
    Build a softmax classification problem under label skew.

    Args:
        n: Node count
        K: Class count
        q: Feature dimension (>= K - 1)
        Pi: Label proportions, n x K
        class_sep: Pairwise distance between class means
        seed: Seed for reference samples and node datasets
        l2_reg: Ridge weight shared by all nodes
        samples_per_node: If set, every node holds a finite dataset of this
                          size (empirical risk, exact expected oracles)
        reference_size: Per-class sample size of the expectation surrogate
                        in online mode

    Returns:
        ProblemSpec with a lazily computed reference optimum

    Raises:
        DimensionMismatch: If Pi does not match (n, K) or q < K - 1
    """
    if Pi.n != n or Pi.K != K:
        raise DimensionMismatch(f"Proportions are {Pi.n} x {Pi.K}, expected {n} x {K}")
    if class_sep <= 0:
        raise ValueError(f"class_sep must be > 0, got: {class_sep}")

    model = SoftmaxModel(K, q, l2_reg)
    means = simplex_means(K, q, class_sep)
    params = {
        "K": K,
        "q": q,
        "class_sep": class_sep,
        "l2_reg": l2_reg,
        "samples_per_node": samples_per_node,
        "reference_size": reference_size,
    }

    if samples_per_node is None:
        spec = _online_spec(model, means, Pi, seed, reference_size)
    else:
        if samples_per_node < 1:
            raise ValueError(f"samples_per_node must be >= 1, got: {samples_per_node}")
        spec = _empirical_spec(model, means, Pi, seed, samples_per_node)

    spec.params = params
    logger.debug(f"Label skew: n={n}, K={K}, q={q}, L={spec.L:.4f}")
    return spec


def _online_spec(
    model: SoftmaxModel,
    means: np.ndarray,
    Pi: ClassProportions,
    seed: int,
    reference_size: int,
) -> ProblemSpec:
    reference = ClassReference(model, means, reference_size, seed)
    objectives = [LabelSkewObjective(model, means, Pi.values[i], reference) for i in range(Pi.n)]
    class_weights = Pi.values.mean(axis=0)
    X_pool, Y_pool, w_pool = reference.pooled(class_weights)
    recipe = {"objective": "per_class_reference", "reference_size": reference_size}
    l2 = model.l2_reg

    def global_value(theta: np.ndarray) -> float:
        values, _ = reference.class_terms(theta)
        return float(class_weights @ values) + 0.5 * l2 * float(theta @ theta)

    def global_grad(theta: np.ndarray) -> np.ndarray:
        _, grads = reference.class_terms(theta)
        return class_weights @ grads + l2 * theta

    def class_grads(theta: np.ndarray) -> np.ndarray:
        _, grads = reference.class_terms(theta)
        return grads + l2 * theta

    return ProblemSpec(
        kind="softmax_label_skew",
        n=Pi.n,
        dim=model.dim,
        objectives=objectives,
        theta0=np.zeros(model.dim),
        L=max(o.smoothness() for o in objectives),
        seed=seed,
        proportions=Pi,
        solver=lambda: _newton_optimum(model, X_pool, Y_pool, w_pool, recipe),
        global_value_fn=global_value,
        global_grad_fn=global_grad,
        class_grads_fn=class_grads,
    )


def _empirical_spec(
    model: SoftmaxModel,
    means: np.ndarray,
    Pi: ClassProportions,
    seed: int,
    samples_per_node: int,
) -> ProblemSpec:
    objectives = []
    for i in range(Pi.n):
        rng = node_stream(seed, StreamDomain.DATASET, i)
        Y = rng.choice(model.K, size=samples_per_node, p=Pi.values[i])
        X = means[Y] + rng.standard_normal((samples_per_node, model.q))
        objectives.append(EmpiricalLabelSkewObjective(model, X, Y))

    X_pool = np.vstack([o.X for o in objectives])
    Y_pool = np.concatenate([o.Y for o in objectives])
    w_pool = np.full(len(Y_pool), 1.0 / len(Y_pool))
    recipe = {"objective": "empirical", "samples_per_node": samples_per_node}

    return ProblemSpec(
        kind="softmax_label_skew",
        n=Pi.n,
        dim=model.dim,
        objectives=objectives,
        theta0=np.zeros(model.dim),
        L=max(o.smoothness() for o in objectives),
        seed=seed,
        proportions=Pi,
        solver=lambda: _newton_optimum(model, X_pool, Y_pool, w_pool, recipe),
        class_grads_fn=lambda theta: _pooled_class_grads(model, X_pool, Y_pool, theta),
    )
