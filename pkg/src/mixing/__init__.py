"""Mixing matrices: validation, canonical topologies and spectral analysis."""

from .matrix import (
    MixingMatrix,
    DegreeReport,
    validate,
    degrees,
    frob_dist_to_uniform,
    as_array,
)
from .topologies import make_topology, list_topologies
from .spectral import mixing_parameter, spectral_gap
from .schedule import MixingSchedule
from .averaging import mix, uniform_average
from .io import (
    read_matrix_csv,
    write_matrix_csv,
    read_matrix_json,
    write_matrix_json,
    read_topology,
    read_schedule_dir,
)

__all__ = [
    "MixingMatrix",
    "DegreeReport",
    "validate",
    "degrees",
    "frob_dist_to_uniform",
    "as_array",
    "make_topology",
    "list_topologies",
    "mixing_parameter",
    "spectral_gap",
    "MixingSchedule",
    "mix",
    "uniform_average",
    "read_matrix_csv",
    "write_matrix_csv",
    "read_matrix_json",
    "write_matrix_json",
    "read_topology",
    "read_schedule_dir",
]
