"""Reproducible experiment pipeline."""

from .config import (
    ExperimentConfig,
    TopologySource,
    StepsizeParams,
    SimulationParams,
    EstimationParams,
    load_config,
    preset_config,
    validate_config,
    list_presets,
    apply_override,
)
from .table import ComparisonRow, ComparisonTable
from .artifacts import ArtifactWriter, git_blob_sha1, hash_file, dumps_json
from .runner import PipelineResult, run_pipeline

__all__ = [
    "ExperimentConfig",
    "TopologySource",
    "StepsizeParams",
    "SimulationParams",
    "EstimationParams",
    "load_config",
    "preset_config",
    "validate_config",
    "list_presets",
    "apply_override",
    "ComparisonRow",
    "ComparisonTable",
    "ArtifactWriter",
    "git_blob_sha1",
    "hash_file",
    "dumps_json",
    "PipelineResult",
    "run_pipeline",
]
