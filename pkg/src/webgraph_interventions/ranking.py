"""PageRank-family kernels: PageRank, Personalized PageRank, Anti-TrustRank
and Inverse-PPR, all as pull-style power iteration over in-link lists.

Every kernel solves the same fixed point

    x = d * P^T x + (d * dangling_mass(x) + (1 - d)) * v

and differs only in the teleport vector ``v``. Dangling mass is sent back
through ``v`` so that all four stay consistent and the total stays 1.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Iterable

import numba
import numpy as np

from .graph import WebGraph, reverse

log = logging.getLogger(__name__)

# the system TBB is too old for numba; avoid its noisy fallback warning
if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@dataclass(frozen=True)
class RankingParams:
    damping: float = 0.85
    tolerance: float = 1e-9
    max_iterations: int = 200

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must be in (0, 1), got {self.damping}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True, eq=False)
class ScoreVector:
    scores: np.ndarray
    iterations_used: int
    residual: float
    converged: bool

    def __len__(self):
        return len(self.scores)


@numba.njit(cache=True, nogil=True)
def _pull_serial(in_offsets, in_sources, share, base, damping, out):
    n = len(out)
    for j in range(n):
        acc = 0.0
        for k in range(in_offsets[j], in_offsets[j + 1]):
            acc += share[in_sources[k]]
        out[j] = damping * acc + base[j]


@numba.njit(cache=True, parallel=True, nogil=True)
def _pull_parallel(in_offsets, in_sources, share, base, damping, out):
    # identical per-node summation order to _pull_serial
    n = len(out)
    for j in numba.prange(n):
        acc = 0.0
        for k in range(in_offsets[j], in_offsets[j + 1]):
            acc += share[in_sources[k]]
        out[j] = damping * acc + base[j]


def _set_threads(threads):
    if threads is None:
        return
    numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))


def _power_iterate(g: WebGraph, teleport: np.ndarray, params: RankingParams, threads=1) -> ScoreVector:
    n = g.node_count
    if n == 0:
        raise ValueError("cannot rank an empty graph")
    inbound = reverse(g)
    in_offsets, in_sources = inbound.offsets, inbound.targets
    out_deg = g.out_degree().astype(np.float64)
    dangling = out_deg == 0
    inv_deg = np.zeros(n)
    np.divide(1.0, out_deg, out=inv_deg, where=~dangling)

    d = params.damping
    x = teleport.copy()
    new = np.empty(n)
    share = np.empty(n)
    kernel = _pull_serial
    if threads is not None and threads != 1:
        _set_threads(threads)
        kernel = _pull_parallel

    # the step residual contracts by d per iteration, so the distance to the
    # fixed point is at most residual * d / (1 - d); stop on that bound
    stop = params.tolerance * (1.0 - d) / d if d > 0.5 else params.tolerance
    residual = np.inf
    it = 0
    while it < params.max_iterations:
        it += 1
        np.multiply(x, inv_deg, out=share)
        dangling_mass = float(x[dangling].sum())
        base = (d * dangling_mass + (1.0 - d)) * teleport
        kernel(in_offsets, in_sources, share, base, d, new)
        residual = float(np.abs(new - x).sum())
        x, new = new, x
        if residual <= stop:
            break
    converged = residual <= stop
    if not converged:
        log.warning(
            "power iteration stopped after %d iterations with L1 residual %.3e", it, residual
        )
    return ScoreVector(x, it, residual, converged)


def _uniform_over(ids: Iterable[int], n: int, what: str) -> np.ndarray:
    ids = np.unique(np.fromiter(ids, dtype=np.int64))
    if len(ids) == 0:
        raise ValueError(f"{what} set must be non-empty")
    if ids[0] < 0 or ids[-1] >= n:
        raise ValueError(f"{what} id out of range [0, {n})")
    v = np.zeros(n)
    v[ids] = 1.0 / len(ids)
    return v


def pagerank(g: WebGraph, params: RankingParams = RankingParams(), threads=1) -> ScoreVector:
    n = g.node_count
    if n == 0:
        raise ValueError("cannot rank an empty graph")
    return _power_iterate(g, np.full(n, 1.0 / n), params, threads)


def personalized_pagerank(
    g: WebGraph, seeds: Iterable[int], params: RankingParams = RankingParams(), threads=1
) -> ScoreVector:
    """PageRank with the teleport vector uniform over ``seeds``."""
    return _power_iterate(g, _uniform_over(seeds, g.node_count, "seed"), params, threads)


def anti_trustrank(
    g: WebGraph, seeds: Iterable[int], params: RankingParams = RankingParams(), threads=1
) -> ScoreVector:
    """Personalized PageRank on the edge-reversed graph.

    High scores mark nodes that link (directly or via short paths) into the
    seed set.
    """
    return personalized_pagerank(reverse(g), seeds, params, threads)


def inverse_ppr(
    g: WebGraph, excluded: Iterable[int], params: RankingParams = RankingParams(), threads=1
) -> ScoreVector:
    """PageRank whose teleport vector is zero on ``excluded`` and uniform
    elsewhere."""
    n = g.node_count
    if n == 0:
        raise ValueError("cannot rank an empty graph")
    ids = np.unique(np.fromiter(excluded, dtype=np.int64))
    if len(ids) and (ids[0] < 0 or ids[-1] >= n):
        raise ValueError(f"excluded id out of range [0, {n})")
    if len(ids) >= n:
        raise ValueError("excluded set covers every node; teleport vector cannot be normalized")
    if len(ids) == 0:
        v = np.full(n, 1.0 / n)
    else:
        v = np.full(n, 1.0 / (n - len(ids)))
        v[ids] = 0.0
    return _power_iterate(g, v, params, threads)


def rank_positions(scores) -> np.ndarray:
    """1-based ordinal positions by descending score, ties by ascending id."""
    s = scores.scores if isinstance(scores, ScoreVector) else np.asarray(scores, dtype=np.float64)
    order = np.lexsort((np.arange(len(s)), -s))
    positions = np.empty(len(s), dtype=np.int64)
    positions[order] = np.arange(1, len(s) + 1)
    return positions


def default_threads() -> int:
    return os.cpu_count() or 1
