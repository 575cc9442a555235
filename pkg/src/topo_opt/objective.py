"""
Topology learning objective.

g(W) = (1/n) ||W Pi - 1 m^T||_F^2 + (lam/n) ||W - J||_F^2

with m the column means of Pi and J = (1/n) 11^T. The first term is the
label-skew bias of the neighbourhood class mixture; the second penalises
distance from uniform averaging (variance).
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import DimensionMismatch
from ..mixing import MixingMatrix, as_array
from ..problems.proportions import ClassProportions

MatrixLike = Union[MixingMatrix, np.ndarray]

# Below this the segment [W, P] is treated as a single point.
DEGENERATE_DENOMINATOR = 1e-15


@dataclass(frozen=True)
class TopoObjective:
    """Class proportions plus the bias/variance trade-off weight lam."""

    proportions: ClassProportions
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be > 0, got: {self.lam}")

    @property
    def n(self) -> int:
        return self.proportions.n

    @property
    def K(self) -> int:
        return self.proportions.K


def _checked(W: MatrixLike, Pi: np.ndarray) -> np.ndarray:
    array = as_array(W)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] != Pi.shape[0]:
        raise DimensionMismatch(
            f"W has shape {array.shape}, proportions have {Pi.shape[0]} rows"
        )
    return array


def _bias_residual(array: np.ndarray, Pi: np.ndarray) -> np.ndarray:
    """W Pi - 1 m^T, one column per class."""
    return array @ Pi - Pi.mean(axis=0)


def bias_term(W: MatrixLike, proportions: ClassProportions) -> float:
    """
    (1/n) sum_k sum_i (sum_j W_ij pi_jk - mean_j pi_jk)^2.

    Shared by g_value and the label-skew bound on H.

    Raises:
        DimensionMismatch: If W and proportions disagree on n
    """
    Pi = proportions.values
    array = _checked(W, Pi)
    residual = _bias_residual(array, Pi)
    return float(np.sum(residual * residual) / array.shape[0])


def g_value(W: MatrixLike, obj: TopoObjective) -> float:
    """
    Evaluate g at W.

    Args:
        W: Mixing matrix (or any n x n array, for finite differences)
        obj: Objective

    Returns:
        bias_term + (lam/n) ||W - J||_F^2

    Raises:
        DimensionMismatch: If W and obj disagree on n
    """
    array = _checked(W, obj.proportions.values)
    n = array.shape[0]
    centered = array - 1.0 / n
    return bias_term(array, obj.proportions) + obj.lam * float(np.sum(centered * centered)) / n


def g_gradient(W: MatrixLike, obj: TopoObjective) -> np.ndarray:
    """
    Gradient of g with respect to W.

    (2/n)(W Pi - 1 m^T) Pi^T + (2 lam/n)(W - J)

    Raises:
        DimensionMismatch: If W and obj disagree on n
    """
    Pi = obj.proportions.values
    array = _checked(W, Pi)
    n = array.shape[0]
    residual = _bias_residual(array, Pi)
    return (2.0 / n) * (residual @ Pi.T) + (2.0 * obj.lam / n) * (array - 1.0 / n)


def line_search(W: MatrixLike, P: MatrixLike, obj: TopoObjective) -> float:
    """
    Exact minimiser of g((1 - gamma) W + gamma P) over gamma in [0, 1].

    g is quadratic along the segment, so the stationary point is closed form:
    with D = P - W and R = W Pi - 1 m^T,

        gamma = -(<R, D Pi> + lam <W - J, D>) / (||D Pi||^2 + lam ||D||^2)

    clamped to [0, 1].

    Returns:
        gamma; 0 when P and W coincide (denominator below 1e-15)
    """
    Pi = obj.proportions.values
    W_arr = _checked(W, Pi)
    P_arr = _checked(P, Pi)
    n = W_arr.shape[0]

    D = P_arr - W_arr
    D_pi = D @ Pi
    denominator = float(np.sum(D_pi * D_pi)) + obj.lam * float(np.sum(D * D))
    if denominator < DEGENERATE_DENOMINATOR:
        return 0.0

    residual = _bias_residual(W_arr, Pi)
    numerator = -(float(np.sum(residual * D_pi)) + obj.lam * float(np.sum((W_arr - 1.0 / n) * D)))
    return float(min(1.0, max(0.0, numerator / denominator)))


def duality_gap(W: MatrixLike, P: MatrixLike, gradient: np.ndarray) -> float:
    """Frank-Wolfe gap <W - P, grad g(W)>; upper-bounds g(W) - min g."""
    return float(np.sum((as_array(W) - as_array(P)) * gradient))
