"""Experiment configuration files and built-in presets."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..errors import ConfigError
from ..problems import ProblemFile
from ..settings import settings

logger = logging.getLogger(__name__)


class TopologySource(BaseModel):
    """
    One topology of the comparison.

    kind:
        generator: make_topology(generator, n)
        file: matrix CSV/JSON at `path`
        learn: Frank-Wolfe on the problem's class proportions, one row per budget
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["generator", "file", "learn"]
    name: Optional[str] = None
    generator: Optional[str] = None
    path: Optional[str] = None
    budgets: List[int] = Field(default_factory=list)
    lam: float = Field(default=settings.topology.lam, gt=0)

    @model_validator(mode="after")
    def _check_fields(self) -> "TopologySource":
        if self.kind == "generator" and not self.generator:
            raise ValueError("generator topologies need 'generator'")
        if self.kind == "file" and not self.path:
            raise ValueError("file topologies need 'path'")
        if self.kind == "learn":
            if not self.budgets or min(self.budgets) < 1:
                raise ValueError("learn topologies need budgets >= 1")
        return self

    def row_names(self) -> List[str]:
        """Table row names this source produces."""
        if self.kind == "learn":
            prefix = self.name or "fw"
            return [f"{prefix}_l{b}" for b in sorted(set(self.budgets))]
        if self.name:
            return [self.name]
        if self.kind == "generator":
            return [self.generator]
        return [Path(self.path).stem]


class StepsizeParams(BaseModel):
    """
    How the D-SGD stepsize is chosen.

    constant: `eta` for every topology
    stable: p / (8L) of the `reference` topology, shared by all rows
    tuned: per topology, from measured sigma_bar^2, H_hat and p
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["constant", "stable", "tuned"] = "stable"
    eta: Optional[float] = Field(default=None, ge=0)
    reference: Optional[str] = None
    r0: Optional[float] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_fields(self) -> "StepsizeParams":
        if self.kind == "constant" and self.eta is None:
            raise ValueError("constant stepsize needs 'eta'")
        if self.kind == "stable" and not self.reference:
            raise ValueError("stable stepsize needs a 'reference' topology")
        return self


class SimulationParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    T: int = Field(default=1000, ge=0)
    stepsize: StepsizeParams
    seeds: List[int] = Field(default_factory=lambda: [0])
    record_every: int = Field(default=settings.simulation.record_every, ge=1)
    mode: Literal["stochastic", "full_batch"] = "stochastic"
    batch_size: int = Field(default=1, ge=1)
    epsilon: float = Field(default=settings.simulation.epsilon, gt=0)

    @model_validator(mode="after")
    def _check_seeds(self) -> "SimulationParams":
        if not self.seeds or min(self.seeds) < 0:
            raise ValueError("seeds must be a non-empty list of non-negative integers")
        return self


class EstimationParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    samples: int = Field(default=settings.estimation.samples, ge=1)
    probes: int = Field(default=8, ge=0)
    sigma_max_sq: Optional[float] = Field(default=None, ge=0)


class ExperimentConfig(BaseModel):
    """A full learn / measure / simulate / compare experiment."""

    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    seed: int = Field(ge=0)
    problem: Union[ProblemFile, str]
    topologies: List[TopologySource]
    simulation: SimulationParams
    estimation: EstimationParams = Field(default_factory=EstimationParams)
    output_dir: str = "runs"

    @model_validator(mode="after")
    def _check_names(self) -> "ExperimentConfig":
        if not self.topologies:
            raise ValueError("at least one topology is required")
        names = [name for source in self.topologies for name in source.row_names()]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise ValueError(f"duplicate topology names: {', '.join(duplicates)}")
        ref = self.simulation.stepsize.reference
        if ref is not None and ref not in names:
            raise ValueError(f"stepsize reference '{ref}' is not one of the topologies")
        return self

    def row_names(self) -> List[str]:
        return [name for source in self.topologies for name in source.row_names()]


def _example1(seed: int) -> Dict[str, Any]:
    return {
        "name": "example1",
        "seed": seed,
        "problem": {
            "kind": "mean_estimation",
            "n": 8,
            "seed": seed,
            "params": {"m": 10.0, "sigma_tilde_sq": 1.0},
        },
        "topologies": [
            {"kind": "generator", "generator": "alternating_ring"},
            {"kind": "generator", "generator": "clustered_ring"},
            {"kind": "generator", "generator": "complete"},
            {"kind": "generator", "generator": "identity"},
        ],
        "simulation": {
            "T": 8000,
            "stepsize": {"kind": "stable", "reference": "alternating_ring"},
            "seeds": list(range(5)),
            "record_every": 10,
            "epsilon": 1e-2,
        },
        "estimation": {"samples": 20000, "probes": 8},
        "output_dir": "runs/example1",
    }


def _label_skew(seed: int) -> Dict[str, Any]:
    return {
        "name": "label_skew",
        "seed": seed,
        "problem": {
            "kind": "softmax_label_skew",
            "n": 20,
            "seed": seed,
            "params": {"K": 5, "q": 4, "class_sep": 4.0, "proportions": "dirichlet", "alpha": 0.1},
        },
        "topologies": [
            {"kind": "learn", "name": "fw", "budgets": [2, 4, 8], "lam": 0.1},
            {"kind": "generator", "generator": "ring"},
            {"kind": "generator", "generator": "complete"},
            {"kind": "generator", "generator": "identity"},
        ],
        "simulation": {
            "T": 2000,
            "stepsize": {"kind": "stable", "reference": "fw_l2"},
            "seeds": list(range(3)),
            "record_every": 20,
            "epsilon": 1e-2,
        },
        "estimation": {"samples": 2000, "probes": 4},
        "output_dir": "runs/label_skew",
    }


PRESETS = {
    "example1": _example1,
    "label_skew": _label_skew,
}


def list_presets() -> List[str]:
    return list(PRESETS.keys())


def _format_validation_error(source: str, error: ValidationError) -> ConfigError:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<root>"
    return ConfigError(f"{source}:{location}", first["msg"])


def validate_config(data: Dict[str, Any], source: str = "<config>") -> ExperimentConfig:
    """
    Validate a raw config mapping.

    Raises:
        ConfigError: Naming the first offending field as source:dotted.path
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise _format_validation_error(source, e) from e


def preset_config(name: str, seed: int = 0, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Built-in experiment by name ('example1' or 'label_skew'), with dotted-key overrides."""
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset '{name}'. Available: {', '.join(PRESETS)}")
    data = PRESETS[name](seed)
    for key, value in (overrides or {}).items():
        apply_override(data, key, value)
    return validate_config(data, source=f"preset:{name}")


def load_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Load an experiment config JSON file; `overrides` (dotted keys) win over file values.

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigError: If the file is not valid JSON or fails validation
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(str(path), f"invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(str(path), "top level must be an object")
    for key, value in (overrides or {}).items():
        apply_override(data, key, value)
    config = validate_config(data, source=str(path))
    logger.info(f"Loaded experiment config: {path}")
    return config


def apply_override(data: Dict[str, Any], dotted_key: str, value: Any) -> None:
    """Set data['a']['b'] = value for dotted_key 'a.b', creating levels as needed."""
    parts = dotted_key.split(".")
    node = data
    for part in parts[:-1]:
        child = node.get(part)
        if not isinstance(child, dict):
            child = {}
            node[part] = child
        node = child
    node[parts[-1]] = value
