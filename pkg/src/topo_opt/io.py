"""Frank-Wolfe trace persistence (JSON lines)."""

import logging
from pathlib import Path
from typing import List, Union

from .frank_wolfe import FwRecord, FwTrace

logger = logging.getLogger(__name__)


def trace_to_jsonl(trace: FwTrace) -> str:
    return "".join(record.model_dump_json() + "\n" for record in trace.records)


def write_fw_trace(trace: FwTrace, path: Union[str, Path]) -> Path:
    """Write one JSON object per Frank-Wolfe step."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(trace_to_jsonl(trace), encoding="utf-8")
    logger.debug(f"Wrote {len(trace.records)} FW records to {path}")
    return path


def read_fw_trace(path: Union[str, Path]) -> List[FwRecord]:
    """Parse a JSON-lines Frank-Wolfe trace."""
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(FwRecord.model_validate_json(line))
    return records
