"""Synthetic webgraphs with planted link schemes, used as ground-truth
fixtures for identification and intervention tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .graph import VertexTable, WebGraph
from .labels import make_labels


@dataclass(frozen=True)
class PlantedGraphSpec:
    reliable_count: int
    mixed_count: int
    unreliable_count: int
    scheme_count: int
    background_count: int
    scheme_out_degree: int
    skew: float
    rng_seed: int
    background_out_degree: int = 10
    scheme_crosslinks: int = 0

    def __post_init__(self):
        counts = (
            self.reliable_count,
            self.mixed_count,
            self.unreliable_count,
            self.scheme_count,
            self.background_count,
            self.scheme_out_degree,
            self.background_out_degree,
            self.scheme_crosslinks,
        )
        if any(c < 0 for c in counts):
            raise ValueError("counts must be >= 0")
        if not 0.0 <= self.skew <= 1.0:
            raise ValueError("skew must be in [0, 1]")

    @property
    def node_count(self) -> int:
        return (
            self.reliable_count
            + self.mixed_count
            + self.unreliable_count
            + self.scheme_count
            + self.background_count
        )


@dataclass(frozen=True, eq=False)
class PlantedGraph:
    graph: WebGraph
    vertices: VertexTable
    labels: pd.DataFrame
    schemes: frozenset[int]
    groups: dict[str, np.ndarray]


def _random_targets(rng, sources, k, n):
    """``k`` uniform targets per source, never the source itself."""
    src = np.repeat(sources, k)
    dst = rng.integers(0, n - 1, size=len(src))
    dst = dst + (dst >= src)  # skip self
    return src, dst


def generate_planted_graph(spec: PlantedGraphSpec) -> PlantedGraph:
    """Generate news, scheme and background nodes.

    Node ids are laid out in blocks: reliable, mixed, unreliable, schemes,
    background. Non-scheme nodes link uniformly at random. Each scheme
    outlink targets the unreliable+mixed pool with probability ``skew`` and
    otherwise behaves like a background link; scheme nodes additionally link
    to ``scheme_crosslinks`` other schemes.
    """
    n = spec.node_count
    if n == 0:
        raise ValueError("spec produces no nodes")
    rng = np.random.default_rng(spec.rng_seed)

    bounds = np.cumsum(
        [0, spec.reliable_count, spec.mixed_count, spec.unreliable_count, spec.scheme_count]
    )
    groups = {
        "reliable": np.arange(bounds[0], bounds[1]),
        "mixed": np.arange(bounds[1], bounds[2]),
        "unreliable": np.arange(bounds[2], bounds[3]),
        "scheme": np.arange(bounds[3], bounds[4]),
        "background": np.arange(bounds[4], n),
    }
    bad_pool = np.concatenate([groups["mixed"], groups["unreliable"]])
    plain = np.concatenate([groups["reliable"], bad_pool, groups["background"]])

    src_parts, dst_parts = [], []
    if n > 1 and spec.background_out_degree:
        s, d = _random_targets(rng, plain, spec.background_out_degree, n)
        src_parts.append(s)
        dst_parts.append(d)

    schemes = groups["scheme"]
    for s in schemes:
        n_bad = rng.binomial(spec.scheme_out_degree, spec.skew)
        n_bad = min(n_bad, len(bad_pool))
        bad = rng.choice(bad_pool, size=n_bad, replace=False)
        n_rest = spec.scheme_out_degree - n_bad
        rest = rng.integers(0, n - 1, size=n_rest) if n > 1 else np.zeros(0, np.int64)
        rest = rest + (rest >= s)
        others = schemes[schemes != s]
        k = min(spec.scheme_crosslinks, len(others))
        cross = rng.choice(others, size=k, replace=False) if k else np.zeros(0, np.int64)
        dst = np.concatenate([bad, rest, cross]).astype(np.int64)
        src_parts.append(np.full(len(dst), s, dtype=np.int64))
        dst_parts.append(dst)

    src = np.concatenate(src_parts) if src_parts else np.zeros(0, np.int64)
    dst = np.concatenate(dst_parts) if dst_parts else np.zeros(0, np.int64)
    graph = WebGraph.from_edges(src, dst, n)

    kinds = (
        ["reliable"] * spec.reliable_count
        + ["mixed"] * spec.mixed_count
        + ["unreliable"] * spec.unreliable_count
        + ["scheme"] * spec.scheme_count
        + ["background"] * spec.background_count
    )
    per_kind: dict[str, int] = {}
    names = []
    for kind in kinds:
        i = per_kind.get(kind, 0)
        per_kind[kind] = i + 1
        names.append(f"com.{kind}-{i:06d}")
    vertices = VertexTable(tuple(names))

    news = np.concatenate([groups["reliable"], bad_pool])
    labels = make_labels(
        (f"{kinds[i]}-{per_i:06d}.com", kinds[i])
        for i, per_i in zip(news, _within_kind_index(kinds, news))
    )
    return PlantedGraph(graph, vertices, labels, frozenset(int(i) for i in schemes), groups)


def _within_kind_index(kinds, ids):
    first = {}
    for i, k in enumerate(kinds):
        first.setdefault(k, i)
    return [int(i) - first[kinds[i]] for i in ids]
