import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from webgraph_interventions.graph import WebGraph  # noqa: E402


def dense_pagerank(n, edges, damping=0.85, teleport=None, iterations=1000):
    """Reference PageRank: dense Google-matrix power iteration.

    Dangling columns are replaced by the teleport vector, so the matrix is
    column-stochastic and the iteration preserves total mass.
    """
    v = np.full(n, 1.0 / n) if teleport is None else np.asarray(teleport, dtype=float)
    adj = np.zeros((n, n))
    for s, t in set(map(tuple, edges)):
        adj[t, s] = 1.0
    out = adj.sum(axis=0)
    M = np.where(out > 0, adj / np.where(out > 0, out, 1.0), v[:, None])
    G = damping * M + (1.0 - damping) * v[:, None]
    x = v.copy()
    for _ in range(iterations):
        x = G @ x
    return x


def random_graph(rng, n, p=None, self_loops=True):
    p = rng.uniform(0.05, 0.5) if p is None else p
    mask = rng.random((n, n)) < p
    if not self_loops:
        np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return WebGraph.from_edges(src, dst, n), list(zip(src.tolist(), dst.tolist()))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
