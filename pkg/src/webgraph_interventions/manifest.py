"""Run manifests: enough to replay a command and check its outputs."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(command: str, argv: list[str], params: dict, inputs, outputs) -> dict:
    return {
        "command": command,
        "argv": list(argv),
        "toolkit_version": __version__,
        "params": params,
        "inputs": {str(p): file_digest(p) for p in sorted(set(map(str, inputs))) if Path(p).is_file()},
        "outputs": {str(p): file_digest(p) for p in sorted(set(map(str, outputs))) if Path(p).is_file()},
    }


def write_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
