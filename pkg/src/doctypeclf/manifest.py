"""Provenance manifests written beside every stage output."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from pathlib import Path
from typing import Iterable, Optional

from . import __version__


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest_path(output) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


def write_manifest(stage: str, outputs: Iterable, inputs: Iterable = (), params: Optional[dict] = None,
                   stats: Optional[dict] = None, seed: Optional[int] = None) -> Path:
    """Record input/output hashes, parameters and counts next to the first output.

    ``created_at`` is the only field that differs between identical re-runs.
    """
    outputs = [Path(p) for p in outputs]
    doc = {
        "stage": stage,
        "version": __version__,
        "created_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "seed": seed,
        "params": params or {},
        "inputs": {str(p): file_sha256(p) for p in inputs if p},
        "outputs": {str(p): file_sha256(p) for p in outputs},
        "stats": stats or {},
    }
    path = manifest_path(outputs[0])
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path
