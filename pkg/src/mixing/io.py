"""Matrix file formats: headerless CSV and {"n", "rows"} JSON."""

import csv
import io
import json
import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from ..errors import ConfigError
from .matrix import MixingMatrix, as_array, validate
from .schedule import MixingSchedule

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_float(value: float) -> str:
    """Locale-free decimal with 17 significant digits (round-trips float64)."""
    return f"{float(value):.17g}"


def array_to_csv(array: np.ndarray) -> str:
    """Render a 2-D array as headerless CSV text."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows([format_float(v) for v in row] for row in np.atleast_2d(array))
    return buffer.getvalue()


def read_array_csv(path: PathLike) -> np.ndarray:
    """
    Parse a headerless numeric CSV into a 2-D float array.

    Quoted cells and blanks after a comma are accepted; empty lines are skipped.

    Raises:
        FileNotFoundError: If path does not exist
        ConfigError: If rows are ragged or a cell is not a number
    """
    path = Path(path)
    rows: List[List[float]] = []
    line_numbers: List[int] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f, skipinitialspace=True)
        for cells in reader:
            if not any(cell.strip() for cell in cells):
                continue
            try:
                rows.append([float(cell) for cell in cells])
            except ValueError:
                raise ConfigError(f"{path}:{reader.line_num}", "non-numeric cell")
            line_numbers.append(reader.line_num)

    if not rows:
        raise ConfigError(str(path), "empty CSV")
    width = len(rows[0])
    for line_no, row in zip(line_numbers, rows):
        if len(row) != width:
            raise ConfigError(f"{path}:{line_no}", f"expected {width} columns, got {len(row)}")
    return np.array(rows, dtype=float)


def read_matrix_csv(path: PathLike, tol: Optional[float] = None) -> MixingMatrix:
    """Load and validate a mixing matrix from CSV."""
    return validate(read_array_csv(path), tol=tol)


def write_matrix_csv(W: Union[MixingMatrix, np.ndarray], path: PathLike) -> Path:
    """Write a matrix as headerless CSV with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(array_to_csv(as_array(W)), encoding="utf-8")
    logger.debug(f"Wrote matrix CSV: {path}")
    return path


def matrix_to_json(W: Union[MixingMatrix, np.ndarray]) -> str:
    array = as_array(W)
    return json.dumps({"n": int(array.shape[0]), "rows": array.tolist()}) + "\n"


def read_matrix_json(path: PathLike, tol: Optional[float] = None) -> MixingMatrix:
    """
    Load a mixing matrix from {"n": int, "rows": [[...]]}.

    Raises:
        ConfigError: If the document is malformed or n disagrees with rows
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(str(path), f"invalid JSON: {e}")

    if not isinstance(data, dict) or "rows" not in data or "n" not in data:
        raise ConfigError(str(path), 'expected an object with "n" and "rows"')
    rows = np.asarray(data["rows"], dtype=float)
    if rows.ndim != 2 or rows.shape[0] != int(data["n"]):
        raise ConfigError(f"{path}:n", f"n={data['n']} does not match {rows.shape[0]} rows")
    return validate(rows, tol=tol)


def write_matrix_json(W: Union[MixingMatrix, np.ndarray], path: PathLike) -> Path:
    """Write a matrix as {"n": int, "rows": [[...]]}; floats use their shortest round-trip repr."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(matrix_to_json(W), encoding="utf-8")
    return path


def read_topology(path: PathLike) -> MixingMatrix:
    """Load a matrix from CSV or JSON based on the file suffix."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return read_matrix_json(path)
    return read_matrix_csv(path)


def read_schedule_dir(path: PathLike, policy: str = "cyclic") -> MixingSchedule:
    """
    Load every *.csv / *.json matrix in a directory, sorted by file name.

    Args:
        path: Directory holding one matrix per file
        policy: 'cyclic' or 'sequence'

    Returns:
        MixingSchedule
    """
    path = Path(path)
    files = sorted(p for p in path.iterdir() if p.suffix.lower() in (".csv", ".json"))
    if not files:
        raise ConfigError(str(path), "schedule directory holds no matrix files")
    logger.info(f"Loading {len(files)} mixing matrices from {path} ({policy})")
    matrices = [read_topology(p) for p in files]
    if len(matrices) == 1:
        return MixingSchedule.fixed(matrices[0])
    return MixingSchedule(matrices=tuple(matrices), policy=policy)
