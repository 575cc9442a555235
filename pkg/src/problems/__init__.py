"""Per-node stochastic objectives and problem generators."""

from .base import LocalObjective, StreamDomain, node_stream
from .proportions import (
    ClassProportions,
    dirichlet_proportions,
    homogeneous_proportions,
    one_class_per_node,
)
from .spec import OptimumInfo, ProblemSpec
from .mean_estimation import MeanEstimationObjective, make_mean_estimation
from .label_skew import (
    SoftmaxModel,
    LabelSkewObjective,
    EmpiricalLabelSkewObjective,
    make_label_skew,
    simplex_means,
)
from .factory import (
    ProblemFile,
    MeanEstimationParams,
    LabelSkewParams,
    ProblemFactory,
    build_problem,
    load_problem_file,
)

__all__ = [
    "LocalObjective",
    "StreamDomain",
    "node_stream",
    "ClassProportions",
    "dirichlet_proportions",
    "homogeneous_proportions",
    "one_class_per_node",
    "OptimumInfo",
    "ProblemSpec",
    "MeanEstimationObjective",
    "make_mean_estimation",
    "SoftmaxModel",
    "LabelSkewObjective",
    "EmpiricalLabelSkewObjective",
    "make_label_skew",
    "simplex_means",
    "ProblemFile",
    "MeanEstimationParams",
    "LabelSkewParams",
    "ProblemFactory",
    "build_problem",
    "load_problem_file",
]
