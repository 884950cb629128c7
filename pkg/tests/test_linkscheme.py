import numpy as np
import pandas as pd
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_graph
from webgraph_interventions.graph import WebGraph, make_weighted_network
from webgraph_interventions.labels import make_labels
from webgraph_interventions.linkscheme import (
    SchemeThresholds,
    atr_extend,
    identify_link_schemes,
    identify_link_schemes_binary,
    multi_category_intersect,
    sample_labels,
    top_k_by_score,
)
from webgraph_interventions.planted import PlantedGraphSpec, generate_planted_graph
from webgraph_interventions.ranking import anti_trustrank, rank_positions

UNRELIABLE = [f"u{i}.com" for i in range(5)]


def net_from(source, per_target):
    return make_weighted_network([(source, t, w, 1) for t, w in per_target.items()])


class TestSampleLabels:
    @pytest.fixture
    def labels(self):
        rows = [(f"u{i}.com", "unreliable", None) for i in range(100)]
        rows += [(f"r{i}.com", "reliable", None) for i in range(7)]
        return make_labels(pd.DataFrame(rows, columns=["domain", "reliability", "bias"]))

    def test_deterministic(self, labels):
        a = sample_labels(labels, "unreliable", 0.2, 42)
        b = sample_labels(labels, "unreliable", 0.2, 42)
        assert len(a) == 20 and a["domain"].tolist() == b["domain"].tolist()
        assert set(a["reliability"]) == {"unreliable"}
        assert sample_labels(labels, "unreliable", 0.2, 43)["domain"].tolist() != a["domain"].tolist()

    def test_full_fraction(self, labels):
        assert len(sample_labels(labels, "reliable", 1.0, 0)) == 7

    def test_ceiling(self, labels):
        assert len(sample_labels(labels, "reliable", 0.2, 0)) == 2

    def test_empty_class(self, labels):
        with pytest.raises(ValueError):
            sample_labels(labels, "mixed", 0.2, 42)

    @pytest.mark.parametrize("fraction", [0.0, 1.5])
    def test_fraction_range(self, labels, fraction):
        with pytest.raises(ValueError):
            sample_labels(labels, "reliable", fraction, 0)


class TestWeightedIdentification:
    def test_both_thresholds_met(self):
        net = net_from("s.com", {"u0.com": 50_000, "u1.com": 50_000, "u2.com": 50_000})
        assert identify_link_schemes(net, UNRELIABLE) == {"s.com"}

    def test_breadth_fails(self):
        assert identify_link_schemes(net_from("s.com", {"u0.com": 150_000}), UNRELIABLE) == set()

    def test_volume_fails(self):
        net = net_from("s.com", {u: 10_000 for u in UNRELIABLE})
        assert identify_link_schemes(net, UNRELIABLE) == set()

    def test_non_unreliable_targets_ignored(self):
        net = net_from("s.com", {"u0.com": 60_000, "ok.com": 900_000, "u1.com": 40_000})
        assert identify_link_schemes(net, UNRELIABLE) == {"s.com"}

    def test_unreliable_sources_eligible_unless_excluded(self):
        net = net_from("u4.com", {"u0.com": 60_000, "u1.com": 60_000})
        assert identify_link_schemes(net, UNRELIABLE) == {"u4.com"}
        assert identify_link_schemes(net, UNRELIABLE, exclude_unreliable=True) == set()

    def test_empty_network(self):
        with pytest.raises(ValueError):
            identify_link_schemes(net_from("s", {}), UNRELIABLE)

    @pytest.mark.parametrize("v, b", [(-1, 2), (0, 0)])
    def test_thresholds_validated(self, v, b):
        with pytest.raises(ValueError):
            SchemeThresholds(v, b)

    @given(
        st.lists(st.tuples(st.integers(0, 6), st.integers(0, 7), st.integers(0, 500)), min_size=1, max_size=40),
        st.integers(0, 1000), st.integers(0, 5), st.integers(0, 300), st.integers(0, 3),
    )
    def test_monotone(self, rows, v, b, dv, db):
        seen, data = set(), []
        for s, t, w in rows:
            if (s, t) not in seen:
                seen.add((s, t))
                data.append((f"s{s}", f"t{t}", w, 1))
        net = make_weighted_network(data)
        unreliable = [f"t{i}" for i in range(5)]
        if v == 0 and b == 0:
            b = 1
        low = identify_link_schemes(net, unreliable, SchemeThresholds(v, b))
        high = identify_link_schemes(net, unreliable, SchemeThresholds(v + dv, b + db))
        assert high <= low


class TestBinaryIdentification:
    def _graph(self, hits):
        n = 1 + 250
        dst = list(range(1, 1 + hits))
        return WebGraph.from_edges([0] * hits, dst, n), range(1, 251)

    def test_200_identified(self):
        g, u = self._graph(200)
        assert identify_link_schemes_binary(g, u, 200) == {0}

    def test_199_not_identified(self):
        g, u = self._graph(199)
        assert identify_link_schemes_binary(g, u, 200) == set()

    def test_beta_validated(self):
        g, u = self._graph(3)
        with pytest.raises(ValueError):
            identify_link_schemes_binary(g, u, 0)

    def test_brute_force(self, rng):
        for _ in range(10):
            n = int(rng.integers(50, 1000))
            g, _ = random_graph(rng, n, float(rng.uniform(0.005, 0.05)))
            u = set(rng.choice(n, size=n // 4, replace=False).tolist())
            beta = int(rng.integers(1, 8))
            expected = {s for s in range(n) if len(set(g.successors(s).tolist()) & u) >= beta}
            assert identify_link_schemes_binary(g, u, beta) == expected

    def test_planted_exact(self):
        p = generate_planted_graph(PlantedGraphSpec(250, 250, 250, 30, 5000, 500, 0.9, 5))
        u = p.groups["unreliable"].tolist()
        assert identify_link_schemes_binary(p.graph, u, 200) == p.schemes


class TestAtrExtend:
    def test_top_k_fixed_point(self):
        # 2 and 3 are the seeds and the only nodes reachable in reverse
        g = WebGraph.from_edges([0, 1], [1, 0], 4)
        assert atr_extend(g, {2, 3}, top_k=2) == {2, 3}

    def test_threshold_above_one(self, rng):
        g, _ = random_graph(rng, 30, 0.2)
        assert atr_extend(g, {1, 5}, score_threshold=1.1) == {1, 5}

    def test_output_contains_seeds(self, rng):
        for _ in range(20):
            g, _ = random_graph(rng, 25, 0.1)
            seeds = set(rng.choice(25, size=4, replace=False).tolist())
            assert seeds <= atr_extend(g, seeds, top_k=2)

    @pytest.mark.parametrize("kwargs", [{}, {"top_k": 1, "score_threshold": 0.1}, {"top_k": 99},
                                        {"score_threshold": 0}])
    def test_mode_errors(self, kwargs):
        with pytest.raises(ValueError):
            atr_extend(WebGraph.from_edges([0], [1], 2), {1}, **kwargs)

    def test_recovers_crosslinked_schemes(self):
        spec = PlantedGraphSpec(100, 100, 100, 40, 3000, 150, 0.9, 21, scheme_crosslinks=20)
        p = generate_planted_graph(spec)
        schemes = sorted(p.schemes)
        half, rest = set(schemes[:20]), set(schemes[20:])
        out = atr_extend(p.graph, half, top_k=len(schemes))
        assert rest <= out
        assert out == p.schemes


class TestMultiCategory:
    def test_filter(self):
        assert multi_category_intersect([2e-4, 5e-5], [3e-4, 2e-4], 1e-4) == {0}

    def test_high_tau(self):
        assert multi_category_intersect([0.3, 0.7], [0.5, 0.5], 0.9) == set()

    def test_same_vector(self, rng):
        a = rng.random(50) * 1e-3
        assert multi_category_intersect(a, a, 5e-4) == set(np.flatnonzero(a > 5e-4).tolist())

    def test_subset_of_each(self, rng):
        for _ in range(20):
            a, b = rng.random(40), rng.random(40)
            out = multi_category_intersect(a, b, 0.5)
            assert out <= set(np.flatnonzero(a > 0.5).tolist())
            assert out <= set(np.flatnonzero(b > 0.5).tolist())

    def test_errors(self):
        with pytest.raises(ValueError):
            multi_category_intersect([1.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            multi_category_intersect([1.0], [1.0], 0)

    def test_on_atr_output(self, rng):
        g, _ = random_graph(rng, 40, 0.1)
        a, b = anti_trustrank(g, [0, 1]), anti_trustrank(g, [2, 3])
        out = multi_category_intersect(a, b, 0.01)
        assert out == set(np.flatnonzero((a.scores > 0.01) & (b.scores > 0.01)).tolist())


class TestTopK:
    def test_examples(self):
        assert top_k_by_score([0.5, 0.3, 0.2], 2) == {0, 1}
        assert top_k_by_score([0.5, 0.3, 0.2], 3) == {0, 1, 2}
        assert top_k_by_score([0.1, 0.3, 0.3, 0.3], 2) == {1, 2}

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            top_k_by_score([0.5], 2)

    def test_agrees_with_positions(self, rng):
        s = rng.integers(0, 4, size=25) / 4
        assert top_k_by_score(s, 9) == set(np.flatnonzero(rank_positions(s) <= 9).tolist())
