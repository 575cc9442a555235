"""Artifact writing and the run manifest."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def git_blob_sha1(data: bytes) -> str:
    """Content hash as git computes it for a blob object."""
    header = f"blob {len(data)}\0".encode("ascii")
    return hashlib.sha1(header + data).hexdigest()


def hash_file(path: PathLike) -> str:
    return git_blob_sha1(Path(path).read_bytes())


def dumps_json(data: Any) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


class ArtifactWriter:
    """
    Writes files under one output directory and remembers their hashes.

    Paths recorded in the manifest are relative to the output directory.
    """

    def __init__(self, root: PathLike):
        self.root = Path(root)
        self.outputs: Dict[str, str] = {}
        self.inputs: Dict[str, str] = {}

    def path(self, relative: str) -> Path:
        return self.root / relative

    def write_text(self, relative: str, text: str) -> Path:
        target = self.path(relative)
        target.parent.mkdir(parents=True, exist_ok=True)
        data = text.encode("utf-8")
        target.write_bytes(data)
        self.outputs[relative] = git_blob_sha1(data)
        logger.debug(f"Wrote artifact: {target}")
        return target

    def write_json(self, relative: str, data: Any) -> Path:
        return self.write_text(relative, dumps_json(data))

    def register_output(self, relative: str) -> None:
        """Hash a file that was written by another writer (e.g. a streaming sink)."""
        self.outputs[relative] = hash_file(self.path(relative))

    def register_input(self, label: str, path: PathLike) -> None:
        self.inputs[label] = hash_file(path)

    def register_input_text(self, label: str, text: str) -> None:
        self.inputs[label] = git_blob_sha1(text.encode("utf-8"))

    def write_manifest(
        self,
        config: Dict[str, Any],
        cells: Optional[Dict[str, Any]] = None,
        name: str = "manifest.json",
    ) -> Path:
        """Write the manifest: config echo, input and output hashes, cell provenance."""
        manifest = {
            "config": config,
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": dict(sorted(self.outputs.items())),
            "cells": cells or {},
        }
        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(dumps_json(manifest), encoding="utf-8")
        logger.info(f"Wrote manifest with {len(self.outputs)} outputs: {target}")
        return target
