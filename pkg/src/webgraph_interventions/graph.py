"""Host-level webgraphs in flat offsets+targets (CSR) layout, plus the
weighted backlink network used by the small-scale testbed."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
import pandas as pd

from .errors import InputError
from .io import open_text, read_csv, require_columns


@dataclass(frozen=True)
class VertexTable:
    """Dense id <-> reversed-host name mapping (``com.example``)."""

    names: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for i, name in enumerate(self.names):
            if name in index:
                raise InputError(f"duplicate domain name {name!r}")
            index[name] = i
        object.__setattr__(self, "_index", index)

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index

    def id_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown domain {name!r}") from None

    def name_of(self, i: int) -> str:
        return self.names[i]

    def get(self, name: str, default=None):
        return self._index.get(name, default)

    def resolve(self, names: Iterable[str]) -> tuple[frozenset[int], list[str]]:
        """Map names to ids; returns (resolved ids, unresolved names)."""
        ids, missing = set(), []
        for name in names:
            i = self._index.get(name)
            if i is None:
                missing.append(name)
            else:
                ids.add(i)
        return frozenset(ids), missing


def load_vertices(path) -> VertexTable:
    """Read ``<id>\\t<name>`` or bare ``<name>`` lines.

    Explicit ids must be contiguous from 0 in file order.
    """
    path = Path(path)
    if not path.exists():
        raise InputError("file not found", path=path)
    names: list[str] = []
    seen: dict[str, int] = {}
    with open_text(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) == 1:
                name = parts[0].strip()
            elif len(parts) == 2:
                try:
                    vid = int(parts[0])
                except ValueError:
                    raise InputError(f"malformed vertex id {parts[0]!r}", path, lineno) from None
                if vid != len(names):
                    raise InputError(
                        f"non-contiguous or duplicate id {vid} (expected {len(names)})",
                        path,
                        lineno,
                    )
                name = parts[1].strip()
            else:
                raise InputError("malformed vertex line", path, lineno)
            if not name:
                raise InputError("empty domain name", path, lineno)
            if name in seen:
                raise InputError(
                    f"duplicate domain name {name!r} (first on line {seen[name]})", path, lineno
                )
            seen[name] = lineno
            names.append(name)
    return VertexTable(tuple(names))


@dataclass(frozen=True, eq=False)
class WebGraph:
    """Immutable binarized directed graph.

    ``targets[offsets[i]:offsets[i + 1]]`` is the sorted, duplicate-free outlink
    list of node ``i``.
    """

    offsets: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        self.offsets.setflags(write=False)
        self.targets.setflags(write=False)

    @classmethod
    def from_edges(cls, src, dst, node_count: int) -> "WebGraph":
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have equal length")
        if node_count < 0:
            raise ValueError("node_count must be >= 0")
        if len(src):
            lo = min(src.min(), dst.min())
            hi = max(src.max(), dst.max())
            if lo < 0 or hi >= node_count:
                raise InputError(f"edge endpoint out of range [0, {node_count})")
            order = np.lexsort((dst, src))
            src, dst = src[order], dst[order]
            keep = np.ones(len(src), dtype=bool)
            keep[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
            src, dst = src[keep], dst[keep]
        counts = np.bincount(src, minlength=node_count) if node_count else np.zeros(0, np.int64)
        offsets = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        return cls(offsets, dst.astype(np.int32 if node_count < 2**31 else np.int64))

    @property
    def node_count(self) -> int:
        return len(self.offsets) - 1

    @property
    def edge_count(self) -> int:
        return int(self.offsets[-1])

    def out_degree(self) -> np.ndarray:
        return np.diff(self.offsets)

    def successors(self, node: int) -> np.ndarray:
        return self.targets[self.offsets[node] : self.offsets[node + 1]]

    def sources(self) -> np.ndarray:
        """Source id of every edge, aligned with ``targets``."""
        return np.repeat(np.arange(self.node_count, dtype=np.int64), self.out_degree())

    def edge_array(self) -> np.ndarray:
        return np.column_stack([self.sources(), self.targets.astype(np.int64)])

    def __eq__(self, other):
        if not isinstance(other, WebGraph):
            return NotImplemented
        return np.array_equal(self.offsets, other.offsets) and np.array_equal(
            self.targets, other.targets
        )

    def __repr__(self):
        return f"WebGraph(nodes={self.node_count}, edges={self.edge_count})"


def _scan_edges(path, node_count):
    src, dst = [], []
    with open_text(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise InputError("malformed edge line", path, lineno)
            try:
                s, d = int(parts[0]), int(parts[1])
            except ValueError:
                raise InputError("malformed edge line", path, lineno) from None
            if not (0 <= s < node_count and 0 <= d < node_count):
                raise InputError(f"id out of range [0, {node_count})", path, lineno)
            src.append(s)
            dst.append(d)
    return np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)


def load_edges(path, vertices: VertexTable) -> WebGraph:
    """Read ``<src>\\t<dst>`` lines; duplicates collapse (binarized graph)."""
    path = Path(path)
    if not path.exists():
        raise InputError("file not found", path=path)
    n = len(vertices)
    try:
        df = pd.read_csv(
            path,
            sep="\t",
            header=None,
            names=["src", "dst"],
            dtype=np.int64,
            compression="infer",
            skip_blank_lines=True,
        )
        src, dst = df["src"].to_numpy(), df["dst"].to_numpy()
        bad = (src < 0) | (src >= n) | (dst < 0) | (dst >= n)
        if bad.any():
            raise ValueError("out of range")
    except pd.errors.EmptyDataError:
        src = dst = np.zeros(0, dtype=np.int64)
    except (ValueError, pd.errors.ParserError):
        # slow path pinpoints the offending line
        src, dst = _scan_edges(path, n)
    return WebGraph.from_edges(src, dst, n)


def reverse(g: WebGraph) -> WebGraph:
    return WebGraph.from_edges(g.targets, g.sources(), g.node_count)


def remove_outlinks(g: WebGraph, sources: Iterable[int]) -> WebGraph:
    """Copy of ``g`` in which every node in ``sources`` has no outlinks."""
    ids = np.fromiter(sources, dtype=np.int64)
    if len(ids) and (ids.min() < 0 or ids.max() >= g.node_count):
        raise InputError(f"source id out of range [0, {g.node_count})")
    drop = np.zeros(g.node_count, dtype=bool)
    drop[ids] = True
    deg = g.out_degree()
    keep_edge = np.repeat(~drop, deg)
    new_deg = np.where(drop, 0, deg)
    offsets = np.zeros_like(g.offsets)
    np.cumsum(new_deg, out=offsets[1:])
    return WebGraph(offsets, g.targets[keep_edge].copy())


@dataclass(frozen=True)
class GraphStats:
    nodes: int
    edges: int
    mean_degree: float
    dangling_count: int
    dangling_fraction: float


def degree_stats(g: WebGraph) -> GraphStats:
    n, m = g.node_count, g.edge_count
    dangling = int(np.count_nonzero(g.out_degree() == 0))
    return GraphStats(
        nodes=n,
        edges=m,
        mean_degree=m / n if n else 0.0,
        dangling_count=dangling,
        dangling_fraction=dangling / n if n else 0.0,
    )


# --- weighted backlink network -------------------------------------------

NETWORK_COLUMNS = ["source", "target", "backlinks", "ref_pages"]


def make_weighted_network(rows) -> pd.DataFrame:
    """Build and validate a backlink network frame from an iterable of
    ``(source, target, backlinks, ref_pages)`` tuples or a DataFrame."""
    df = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows), columns=NETWORK_COLUMNS)
    return _validate_network(df.copy())


def _validate_network(df: pd.DataFrame, path=None) -> pd.DataFrame:
    require_columns(df, NETWORK_COLUMNS, path)
    df = df[NETWORK_COLUMNS].copy()
    df["source"] = df["source"].astype(str).str.strip()
    df["target"] = df["target"].astype(str).str.strip()
    for col in ("backlinks", "ref_pages"):
        values = pd.to_numeric(df[col], errors="coerce")
        bad = values.isna() | (values != values.round())
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise InputError(f"non-integer {col} {df[col].iloc[row]!r}", path, row + 2)
        if (values < 0).any():
            row = int(np.flatnonzero((values < 0).to_numpy())[0])
            raise InputError(f"negative {col} {df[col].iloc[row]!r}", path, row + 2)
        df[col] = values.astype(np.int64)
    dup = df.duplicated(["source", "target"])
    if dup.any():
        row = int(np.flatnonzero(dup.to_numpy())[0])
        s, t = df["source"].iloc[row], df["target"].iloc[row]
        raise InputError(f"duplicate edge ({s}, {t})", path, row + 2)
    return df.reset_index(drop=True)


def load_weighted_network(path) -> pd.DataFrame:
    df = read_csv(path, dtype=str, keep_default_na=False)
    return _validate_network(df, path)


def filter_weighted_edges(net: pd.DataFrame, min_backlinks: int, min_ref_pages: int) -> pd.DataFrame:
    if min_backlinks < 0 or min_ref_pages < 0:
        raise ValueError("thresholds must be >= 0")
    keep = (net["backlinks"] >= min_backlinks) & (net["ref_pages"] >= min_ref_pages)
    return net.loc[keep].reset_index(drop=True)
