"""File helpers shared by the loaders: gzip-aware opening, domain lists,
score vectors (CSV and binary snapshot)."""

from __future__ import annotations

import gzip
import io
import struct
from pathlib import Path
from typing import Iterable

import numpy as np
import pandas as pd

from .errors import InputError

SCORE_MAGIC = b"WGSCORE1"


def open_text(path, mode="rt"):
    """Open a UTF-8 text file, transparently gunzipping ``*.gz`` paths."""
    path = Path(path)
    if path.suffix == ".gz":
        if "w" in mode:
            # mtime=0 keeps compressed output byte-reproducible
            raw = gzip.GzipFile(path, "wb", mtime=0)
            return io.TextIOWrapper(raw, encoding="utf-8", newline="")
        return gzip.open(path, mode, encoding="utf-8", newline="")
    return open(path, mode, encoding="utf-8", newline="")


def read_csv(path, **kwargs) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise InputError("file not found", path=path)
    kwargs.setdefault("compression", "infer")
    try:
        return pd.read_csv(path, **kwargs)
    except pd.errors.EmptyDataError:
        raise InputError("empty CSV file", path=path) from None
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise InputError(f"malformed CSV: {exc}", path=path) from None


def require_columns(df: pd.DataFrame, columns: Iterable[str], path=None):
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise InputError(f"missing column(s): {', '.join(missing)}", path=path)


def read_domain_list(path) -> list[str]:
    """Newline-delimited domain names; blank lines and duplicates are skipped."""
    path = Path(path)
    if not path.exists():
        raise InputError("file not found", path=path)
    seen = {}
    with open_text(path) as fh:
        for raw in fh:
            name = raw.strip()
            if name:
                seen.setdefault(name, None)
    return list(seen)


def write_domain_list(path, names: Iterable[str]):
    with open_text(path, "wt") as fh:
        for name in names:
            fh.write(f"{name}\n")


def write_scores_csv(path, names, scores: np.ndarray):
    """Write ``domain,score`` sorted by descending score, ties by ascending id."""
    order = np.lexsort((np.arange(len(scores)), -scores))
    with open_text(path, "wt") as fh:
        fh.write("domain,score\n")
        for i in order:
            fh.write(f"{names[i]},{float(scores[i])!r}\n")


def read_scores_csv(path) -> tuple[list[str], np.ndarray]:
    df = read_csv(path, dtype={"domain": str}, keep_default_na=False)
    require_columns(df, ["domain", "score"], path)
    try:
        scores = df["score"].astype(np.float64).to_numpy()
    except ValueError:
        raise InputError("non-numeric score", path=path) from None
    if df["domain"].duplicated().any():
        dup = df.loc[df["domain"].duplicated(), "domain"].iloc[0]
        raise InputError(f"duplicate domain {dup!r}", path=path)
    return df["domain"].tolist(), scores


def write_scores_binary(path, scores: np.ndarray):
    """Snapshot: 8-byte magic, node count as little-endian u64, then f64 LE."""
    with open(path, "wb") as fh:
        fh.write(SCORE_MAGIC)
        fh.write(struct.pack("<Q", len(scores)))
        fh.write(np.asarray(scores, dtype="<f8").tobytes())


def read_scores_binary(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 16 or data[:8] != SCORE_MAGIC:
        raise InputError("not a score snapshot (bad magic)", path=path)
    (n,) = struct.unpack("<Q", data[8:16])
    if len(data) != 16 + 8 * n:
        raise InputError(f"snapshot length does not match node count {n}", path=path)
    return np.frombuffer(data, dtype="<f8", offset=16).astype(np.float64)


def write_csv(path, df: pd.DataFrame):
    buf = io.StringIO()
    df.to_csv(buf, index=False, lineterminator="\n", float_format=None)
    with open_text(path, "wt") as fh:
        fh.write(buf.getvalue())
