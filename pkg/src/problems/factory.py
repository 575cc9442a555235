"""Problem spec files and the builder registry."""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from ..errors import ConfigError
from .label_skew import DEFAULT_L2, DEFAULT_REFERENCE_SIZE, make_label_skew
from .mean_estimation import make_mean_estimation
from .proportions import (
    ClassProportions,
    dirichlet_proportions,
    homogeneous_proportions,
    one_class_per_node,
)
from .spec import ProblemSpec

logger = logging.getLogger(__name__)


class MeanEstimationParams(BaseModel):
    """Parameters of the two-cluster mean estimation problem."""

    model_config = ConfigDict(extra="forbid")

    m: float = 1.0
    sigma_tilde_sq: float = Field(default=1.0, ge=0)
    dim: int = Field(default=1, ge=1)
    theta0: Optional[float] = None


class LabelSkewParams(BaseModel):
    """Parameters of the softmax label-skew problem."""

    model_config = ConfigDict(extra="forbid")

    K: int = Field(default=5, ge=2)
    q: int = Field(default=4, ge=1)
    class_sep: float = Field(default=4.0, gt=0)
    proportions: Literal["dirichlet", "homogeneous", "one_class", "file"] = "dirichlet"
    alpha: float = Field(default=0.1, gt=0)
    proportions_file: Optional[str] = None
    l2_reg: float = Field(default=DEFAULT_L2, ge=0)
    samples_per_node: Optional[int] = Field(default=None, ge=1)
    reference_size: int = Field(default=DEFAULT_REFERENCE_SIZE, ge=1)


class ProblemFile(BaseModel):
    """On-disk problem spec: {"kind", "n", "params", "seed"}."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["mean_estimation", "softmax_label_skew"]
    n: int = Field(ge=1)
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(default=0, ge=0)


def load_problem_file(path: Union[str, Path]) -> ProblemFile:
    """
    Parse a problem spec JSON file.

    Raises:
        FileNotFoundError: If the file does not exist
        pydantic.ValidationError: If a field is missing or invalid
    """
    path = Path(path)
    return ProblemFile.model_validate_json(path.read_text(encoding="utf-8"))


def resolve_proportions(
    params: LabelSkewParams,
    n: int,
    seed: int,
    base_dir: Optional[Path] = None,
) -> ClassProportions:
    """Materialize the proportions named by a label-skew parameter block."""
    if params.proportions == "homogeneous":
        return homogeneous_proportions(n, params.K)
    if params.proportions == "one_class":
        return one_class_per_node(n, params.K)
    if params.proportions == "file":
        if not params.proportions_file:
            raise ConfigError("params.proportions_file", "required when proportions is 'file'")
        path = Path(params.proportions_file)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return ClassProportions.from_csv(path)
    return dirichlet_proportions(n, params.K, params.alpha, seed)


def _build_mean_estimation(problem: ProblemFile, base_dir: Optional[Path]) -> ProblemSpec:
    params = MeanEstimationParams.model_validate(problem.params)
    return make_mean_estimation(
        n=problem.n,
        m=params.m,
        sigma_tilde_sq=params.sigma_tilde_sq,
        dim=params.dim,
        theta0=params.theta0,
        seed=problem.seed,
    )


def _build_label_skew(problem: ProblemFile, base_dir: Optional[Path]) -> ProblemSpec:
    params = LabelSkewParams.model_validate(problem.params)
    Pi = resolve_proportions(params, problem.n, problem.seed, base_dir)
    return make_label_skew(
        n=problem.n,
        K=params.K,
        q=params.q,
        Pi=Pi,
        class_sep=params.class_sep,
        seed=problem.seed,
        l2_reg=params.l2_reg,
        samples_per_node=params.samples_per_node,
        reference_size=params.reference_size,
    )


class ProblemFactory:
    """Factory for building ProblemSpec instances from spec files."""

    _builders: Dict[str, Callable[[ProblemFile, Optional[Path]], ProblemSpec]] = {
        "mean_estimation": _build_mean_estimation,
        "softmax_label_skew": _build_label_skew,
    }

    @classmethod
    def build(cls, problem: ProblemFile, base_dir: Optional[Path] = None) -> ProblemSpec:
        """
        Build a problem from a parsed spec file.

        Args:
            problem: Parsed spec
            base_dir: Directory relative paths inside params are resolved against

        Returns:
            ProblemSpec

        Raises:
            ValueError: If kind is unknown
        """
        if problem.kind not in cls._builders:
            available = ", ".join(cls._builders.keys())
            raise ValueError(f"Unknown problem kind: {problem.kind}. Available: {available}")

        logger.info(f"Building problem: {problem.kind} (n={problem.n}, seed={problem.seed})")
        return cls._builders[problem.kind](problem, base_dir)

    @classmethod
    def list_kinds(cls) -> list:
        """List available problem kinds."""
        return list(cls._builders.keys())


# Convenience function
def build_problem(
    source: Union[ProblemFile, str, Path],
    base_dir: Optional[Path] = None,
) -> ProblemSpec:
    """
    Build a problem from a ProblemFile or a path to one (convenience function).

    Args:
        source: Parsed spec or JSON file path
        base_dir: Resolution directory for relative paths (defaults to the file's directory)

    Returns:
        ProblemSpec
    """
    if isinstance(source, ProblemFile):
        return ProblemFactory.build(source, base_dir)
    path = Path(source)
    return ProblemFactory.build(load_problem_file(path), base_dir or path.parent)
