"""Sparse topology learning by Frank-Wolfe."""

from .objective import (
    TopoObjective,
    bias_term,
    g_value,
    g_gradient,
    line_search,
    duality_gap,
)
from .nuclear import nuclear_norm, singular_values
from .frank_wolfe import (
    FwRecord,
    FwTrace,
    frank_wolfe,
    learn_topologies,
    theorem3_bound,
    heterogeneity_norm,
)
from .io import write_fw_trace, read_fw_trace

__all__ = [
    "TopoObjective",
    "bias_term",
    "g_value",
    "g_gradient",
    "line_search",
    "duality_gap",
    "nuclear_norm",
    "singular_values",
    "FwRecord",
    "FwTrace",
    "frank_wolfe",
    "learn_topologies",
    "theorem3_bound",
    "heterogeneity_norm",
    "write_fw_trace",
    "read_fw_trace",
]
