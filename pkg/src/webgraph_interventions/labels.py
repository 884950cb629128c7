"""Reliability/bias label tables and domain-name resolution against a
vertex table."""

from __future__ import annotations

import logging
from typing import Iterable

import pandas as pd

from .errors import InputError
from .graph import VertexTable
from .io import read_csv, require_columns

log = logging.getLogger(__name__)

RELIABILITY = ("reliable", "mixed", "unreliable")
BIAS = (
    "extreme-left",
    "left",
    "center-left",
    "center",
    "center-right",
    "right",
    "extreme-right",
)


def make_labels(rows) -> pd.DataFrame:
    """Validated label frame with columns ``domain, reliability, bias``.

    ``rows`` is a DataFrame or an iterable of ``(domain, reliability)`` /
    ``(domain, reliability, bias)`` tuples.
    """
    if isinstance(rows, pd.DataFrame):
        df = rows.copy()
    else:
        rows = [tuple(r) + (None,) * (3 - len(r)) for r in rows]
        df = pd.DataFrame(rows, columns=["domain", "reliability", "bias"])
    return _validate(df)


def _validate(df: pd.DataFrame, path=None) -> pd.DataFrame:
    require_columns(df, ["domain", "reliability"], path)
    if "bias" not in df.columns:
        df["bias"] = None
    df = df[["domain", "reliability", "bias"]].copy()
    df["domain"] = df["domain"].astype(str).str.strip()
    df["reliability"] = df["reliability"].astype(str).str.strip().str.lower()
    bias = df["bias"].where(df["bias"].notna(), "").astype(str).str.strip().str.lower()
    df["bias"] = bias.where(bias != "", None)
    bad = ~df["reliability"].isin(RELIABILITY)
    if bad.any():
        row = int(bad.to_numpy().nonzero()[0][0])
        raise InputError(f"unknown reliability {df['reliability'].iloc[row]!r}", path, row + 2)
    bad = df["bias"].notna() & ~df["bias"].isin(BIAS)
    if bad.any():
        row = int(bad.to_numpy().nonzero()[0][0])
        raise InputError(f"unknown bias {df['bias'].iloc[row]!r}", path, row + 2)
    dup = df["domain"].duplicated()
    if dup.any():
        row = int(dup.to_numpy().nonzero()[0][0])
        raise InputError(f"duplicate domain {df['domain'].iloc[row]!r}", path, row + 2)
    return df.reset_index(drop=True)


def load_labels(path) -> pd.DataFrame:
    df = read_csv(path, dtype=str, keep_default_na=False)
    return _validate(df, path)


def reverse_host(name: str) -> str:
    """``www.example.com`` -> ``com.example.www`` (and back)."""
    return ".".join(reversed(name.split(".")))


def candidate_names(domain: str) -> list[str]:
    """Vertex names a label domain may appear under: as given, reversed-host,
    and the reversed ``www`` host."""
    bare = domain[4:] if domain.startswith("www.") else domain
    rev = reverse_host(bare)
    out = []
    for c in (domain, rev, rev + ".www"):
        if c not in out:
            out.append(c)
    return out


def resolve_domains(vertices: VertexTable, domains: Iterable[str]) -> tuple[dict[str, list[int]], list[str]]:
    """Resolve label domains to vertex ids.

    Returns ``{domain: [ids]}`` for domains with at least one match and the
    list of unresolved domains. Unresolved names are logged, never fatal.
    """
    matched: dict[str, list[int]] = {}
    missing: list[str] = []
    for domain in domains:
        ids = [i for c in candidate_names(domain) if (i := vertices.get(c)) is not None]
        if ids:
            matched[domain] = sorted(set(ids))
        else:
            missing.append(domain)
    if missing:
        log.info("%d domain(s) not found in vertex table", len(missing))
    return matched, missing


def resolve_ids(vertices: VertexTable, domains: Iterable[str]) -> tuple[frozenset[int], list[str]]:
    matched, missing = resolve_domains(vertices, domains)
    return frozenset(i for ids in matched.values() for i in ids), missing
