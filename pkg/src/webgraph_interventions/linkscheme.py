"""Link-scheme identification: threshold rules over weighted or binarized
graphs, Anti-TrustRank seed extension and multi-category intersection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
import pandas as pd

from .graph import WebGraph
from .ranking import RankingParams, ScoreVector, anti_trustrank

DEFAULT_BETA_MIN = 200
MULTI_CATEGORY_TAU = 1e-4


@dataclass(frozen=True)
class SchemeThresholds:
    """Volume and breadth thresholds for weighted identification.

    ``min_total_backlinks_to_unreliable`` is the total backlink count a source
    sends to unreliable targets; ``min_distinct_unreliable_targets`` is how
    many distinct unreliable domains it must reach.
    """

    min_total_backlinks_to_unreliable: int = 100_000
    min_distinct_unreliable_targets: int = 2

    def __post_init__(self):
        v, b = self.min_total_backlinks_to_unreliable, self.min_distinct_unreliable_targets
        if v < 0 or b < 0:
            raise ValueError("thresholds must be >= 0")
        if v == 0 and b == 0:
            raise ValueError("at least one threshold must be > 0")


def sample_labels(labels: pd.DataFrame, reliability: str, fraction: float, rng_seed: int) -> pd.DataFrame:
    """Uniform sample without replacement of ceil(fraction * n) rows of one
    reliability class, returned in original row order."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must be in (0, 1]")
    pool = labels.loc[labels["reliability"] == reliability]
    if pool.empty:
        raise ValueError(f"no rows with reliability {reliability!r}")
    k = math.ceil(fraction * len(pool))
    rng = np.random.default_rng(rng_seed)
    pick = np.sort(rng.choice(len(pool), size=k, replace=False))
    return pool.iloc[pick].reset_index(drop=True)


def identify_link_schemes(
    net: pd.DataFrame,
    unreliable: Iterable[str],
    thresholds: SchemeThresholds = SchemeThresholds(),
    exclude_unreliable: bool = False,
) -> frozenset[str]:
    """Sources whose backlinks into ``unreliable`` meet both thresholds."""
    if net.empty:
        raise ValueError("backlink network is empty")
    unreliable = set(unreliable)
    hits = net.loc[net["target"].isin(unreliable)]
    per_source = hits.groupby("source").agg(
        volume=("backlinks", "sum"), breadth=("target", "nunique")
    )
    keep = (per_source["volume"] >= thresholds.min_total_backlinks_to_unreliable) & (
        per_source["breadth"] >= thresholds.min_distinct_unreliable_targets
    )
    found = set(per_source.index[keep])
    if exclude_unreliable:
        found -= unreliable
    return frozenset(found)


def unreliable_outlink_counts(g: WebGraph, unreliable: Iterable[int]) -> np.ndarray:
    """Number of distinct outlink targets of each node inside ``unreliable``."""
    mask = np.zeros(g.node_count, dtype=bool)
    ids = np.fromiter(unreliable, dtype=np.int64)
    mask[ids] = True
    hit = mask[g.targets]
    return np.bincount(g.sources()[hit], minlength=g.node_count)


def identify_link_schemes_binary(
    g: WebGraph, unreliable: Iterable[int], beta_min: int = DEFAULT_BETA_MIN
) -> frozenset[int]:
    if beta_min < 1:
        raise ValueError("beta_min must be >= 1")
    counts = unreliable_outlink_counts(g, unreliable)
    return frozenset(int(i) for i in np.flatnonzero(counts >= beta_min))


def top_k_by_score(scores, k: int) -> frozenset[int]:
    s = scores.scores if isinstance(scores, ScoreVector) else np.asarray(scores)
    if k < 0 or k > len(s):
        raise ValueError(f"k={k} outside [0, {len(s)}]")
    order = np.lexsort((np.arange(len(s)), -s))
    return frozenset(int(i) for i in order[:k])


def atr_extend(
    g: WebGraph,
    seeds: Iterable[int],
    params: RankingParams = RankingParams(),
    top_k: Optional[int] = None,
    score_threshold: Optional[float] = None,
    threads=1,
) -> frozenset[int]:
    """Extend a seed list with the domains Anti-TrustRank ranks highest.

    Exactly one of ``top_k`` / ``score_threshold`` selects the extension; the
    result always includes the seeds.
    """
    if (top_k is None) == (score_threshold is None):
        raise ValueError("give exactly one of top_k or score_threshold")
    if top_k is not None and top_k > g.node_count:
        raise ValueError(f"top_k={top_k} exceeds node count {g.node_count}")
    if score_threshold is not None and score_threshold <= 0:
        raise ValueError("score_threshold must be > 0")
    seeds = frozenset(int(s) for s in seeds)
    atr = anti_trustrank(g, seeds, params, threads)
    if top_k is not None:
        picked = top_k_by_score(atr, top_k)
    else:
        picked = frozenset(int(i) for i in np.flatnonzero(atr.scores > score_threshold))
    return picked | seeds


def multi_category_intersect(scores_a, scores_b, tau: float = MULTI_CATEGORY_TAU) -> frozenset[int]:
    a = scores_a.scores if isinstance(scores_a, ScoreVector) else np.asarray(scores_a)
    b = scores_b.scores if isinstance(scores_b, ScoreVector) else np.asarray(scores_b)
    if len(a) != len(b):
        raise ValueError(f"score vectors differ in length ({len(a)} vs {len(b)})")
    if tau <= 0:
        raise ValueError("tau must be > 0")
    return frozenset(int(i) for i in np.flatnonzero((a > tau) & (b > tau)))
