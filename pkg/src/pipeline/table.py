"""Topology comparison table."""

import math
from dataclasses import dataclass, field
from typing import List, Optional

from ..mixing.io import format_float

NA = "n/a"

COLUMNS = [
    "topology",
    "p",
    "d_in_max",
    "d_out_max",
    "g_value",
    "H_hat",
    "zeta_bar_sq_hat",
    "eta",
    "iterations_to_eps",
    "final_node_gap",
]


@dataclass
class ComparisonRow:
    topology: str
    p: float
    d_in_max: int
    d_out_max: int
    g_value: Optional[float]
    H_hat: float
    zeta_bar_sq_hat: float
    eta: float
    iterations_to_eps: Optional[float]
    final_node_gap: Optional[float]


def _cell(value) -> str:
    if value is None:
        return NA
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    if not math.isfinite(value):
        return NA
    return format_float(value)


def _short(value) -> str:
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return NA
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    if value == int(value) and abs(value) < 1e9:
        return str(int(value))
    return f"{value:.4g}"


@dataclass
class ComparisonTable:
    """One row per topology; cells are finite numbers or 'n/a'."""

    epsilon: float
    rows: List[ComparisonRow] = field(default_factory=list)

    def add(self, row: ComparisonRow) -> None:
        if any(r.topology == row.topology for r in self.rows):
            raise ValueError(f"Duplicate topology row: {row.topology}")
        self.rows.append(row)

    def row(self, topology: str) -> ComparisonRow:
        for r in self.rows:
            if r.topology == topology:
                return r
        raise KeyError(topology)

    @property
    def names(self) -> List[str]:
        return [r.topology for r in self.rows]

    def to_csv(self) -> str:
        lines = [",".join(COLUMNS)]
        for r in self.rows:
            lines.append(",".join(_cell(getattr(r, column)) for column in COLUMNS))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        """Aligned plain-text rendering for terminals and reports."""
        header = list(COLUMNS)
        header[COLUMNS.index("iterations_to_eps")] = f"iters_to_{self.epsilon:g}"
        body = [[_short(getattr(r, column)) for column in COLUMNS] for r in self.rows]
        widths = [max(len(h), *(len(row[k]) for row in body)) if body else len(h) for k, h in enumerate(header)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
        lines.append("  ".join("-" * w for w in widths))
        for row in body:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        return "\n".join(lines) + "\n"
