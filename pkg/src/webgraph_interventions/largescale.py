"""Pre/post comparison of PageRank-family score vectors: grouped centrality
and rank retention, change histograms and affected-domain analysis."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import pandas as pd

from .errors import InputError
from .graph import VertexTable
from .io import read_csv, require_columns
from .labels import RELIABILITY, resolve_domains, reverse_host
from .ranking import ScoreVector, rank_positions
from .smallscale import group_retention

UNCATEGORIZED = "uncategorized"


def _as_array(s) -> np.ndarray:
    return s.scores if isinstance(s, ScoreVector) else np.asarray(s, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class LargeScaleReport:
    per_domain: pd.DataFrame
    centrality: dict
    rank: dict
    centrality_ris: float
    rank_ris: float
    group_sizes: dict
    unresolved: int

    def to_dict(self) -> dict:
        return {
            "centrality_retention": self.centrality,
            "centrality_ris": self.centrality_ris,
            "rank_retention": self.rank,
            "rank_ris": self.rank_ris,
            "group_sizes": self.group_sizes,
            "unresolved_labels": self.unresolved,
        }


def score_delta(pre, post) -> pd.DataFrame:
    """Per-node scores, positions and retention ratios."""
    a, b = _as_array(pre), _as_array(post)
    if len(a) != len(b):
        raise ValueError(f"score vectors differ in length ({len(a)} vs {len(b)})")
    pa, pb = rank_positions(a), rank_positions(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        centrality = np.where(a > 0, b / a, np.nan)
    return pd.DataFrame(
        {
            "pre_score": a,
            "post_score": b,
            "pre_pos": pa,
            "post_pos": pb,
            "centrality_retention": centrality,
            "rank_retention": pa / pb,
        }
    )


def retention_report(pre, post, labels: pd.DataFrame, vertices: VertexTable) -> LargeScaleReport:
    """Group means of centrality retention (post/pre score) and rank
    retention (pre position / post position) over labelled domains.

    A label matching several hosts (bare and ``www``) sums their scores and
    takes the best position of the matched hosts.
    """
    a, b = _as_array(pre), _as_array(post)
    if len(a) != len(b) or len(a) != len(vertices):
        raise ValueError("pre, post and vertex table must cover the same node universe")
    pa, pb = rank_positions(a), rank_positions(b)
    matched, missing = resolve_domains(vertices, labels["domain"])
    label_of = labels.set_index("domain")["reliability"]
    rows = []
    for domain, ids in matched.items():
        ids = np.asarray(ids)
        sa, sb = float(a[ids].sum()), float(b[ids].sum())
        if sa <= 0:
            continue
        qa, qb = int(pa[ids].min()), int(pb[ids].min())
        rows.append((domain, label_of[domain], sa, sb, qa, qb, sb / sa, qa / qb))
    per_domain = pd.DataFrame(
        rows,
        columns=[
            "domain",
            "label",
            "pre_score",
            "post_score",
            "pre_pos",
            "post_pos",
            "centrality_retention",
            "rank_retention",
        ],
    )
    cen, sizes, cen_ris = group_retention(per_domain, "centrality_retention")
    rnk, _, rnk_ris = group_retention(per_domain, "rank_retention")
    empty = [g for g in RELIABILITY if sizes[g] == 0]
    if empty:
        raise ValueError(f"no resolvable domains for label group(s): {', '.join(empty)}")
    return LargeScaleReport(per_domain, cen, rnk, cen_ris, rnk_ris, sizes, len(missing))


@dataclass(frozen=True)
class ChangeHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    below: int
    above: int
    zero_pre: int

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"bin_low": self.bin_edges[:-1], "bin_high": self.bin_edges[1:], "count": self.counts}
        )


def relative_change(pre, post) -> tuple[np.ndarray, np.ndarray]:
    """(post - pre) / pre over nodes with pre > 0, plus that mask."""
    a, b = _as_array(pre), _as_array(post)
    mask = a > 0
    return (b[mask] - a[mask]) / a[mask], mask


def change_distribution(pre, post, bin_edges) -> ChangeHistogram:
    """Histogram of relative score change. Bins are half-open except the
    last, which is closed; values outside the edges count as tails."""
    edges = np.asarray(bin_edges, dtype=np.float64)
    if len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must be strictly increasing with at least two entries")
    rel, mask = relative_change(pre, post)
    counts, _ = np.histogram(rel, bins=edges)
    below = int(np.count_nonzero(rel < edges[0]))
    above = int(np.count_nonzero(rel > edges[-1]))
    return ChangeHistogram(edges, counts, below, above, int(np.count_nonzero(~mask)))


def affected_domains(pre, post, min_pre: float = 1e-7, min_drop: float = 0.5) -> frozenset[int]:
    """Nodes with pre score >= ``min_pre`` that lost at least ``min_drop`` of it."""
    if min_pre <= 0 or min_drop <= 0:
        raise ValueError("thresholds must be > 0")
    a, b = _as_array(pre), _as_array(post)
    eligible = a >= min_pre
    drop = np.zeros_like(a)
    drop[eligible] = (a[eligible] - b[eligible]) / a[eligible]
    return frozenset(int(i) for i in np.flatnonzero(eligible & (drop >= min_drop)))


def categorize(domains: Iterable[str], cats: pd.DataFrame) -> dict[str, int]:
    """Category counts, descending (ties alphabetical), with uncategorized
    domains last. Domains are matched as given or in reversed-host form."""
    lookup = {}
    for d, c in zip(cats["domain"], cats["category"]):
        lookup.setdefault(d, c)
        lookup.setdefault(reverse_host(d), c)
    counts = Counter()
    missing = 0
    for d in domains:
        c = lookup.get(d)
        if c is None:
            missing += 1
        else:
            counts[c] += 1
    out = dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
    if missing:
        out[UNCATEGORIZED] = missing
    return out


def load_categories(path) -> pd.DataFrame:
    df = read_csv(path, dtype=str, keep_default_na=False)
    require_columns(df, ["domain", "category"], path)
    df = df[["domain", "category"]].apply(lambda s: s.str.strip())
    dup = df["domain"].duplicated()
    if dup.any():
        row = int(np.flatnonzero(dup.to_numpy())[0])
        raise InputError(f"domain {df['domain'].iloc[row]!r} has more than one category", path, row + 2)
    return df
