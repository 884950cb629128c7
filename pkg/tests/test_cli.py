"""End-to-end CLI runs over a small planted graph and the synthetic
small-scale tables. Each subcommand runs twice and must produce identical
bytes."""

import json
from pathlib import Path

import pandas as pd
import pytest

from synthetic import smallscale_fixture
from webgraph_interventions.cli import _manifest_path_for, main
from webgraph_interventions.io import read_scores_csv, write_domain_list
from webgraph_interventions.manifest import file_digest, read_manifest


def build_workspace(d):
    """Planted graph under ``d/g`` plus synthetic small-scale tables in ``d``."""
    d = Path(d)
    g = d / "g"
    assert main(["gen-planted", "--quiet", "--reliable", "40", "--mixed", "40", "--unreliable", "40",
                 "--schemes", "8", "--background", "800", "--scheme-out-degree", "60", "--crosslinks", "4",
                 "--seed", "9", "--out-dir", str(g)]) == 0
    attrs, labels, net, schemes, pairs = smallscale_fixture(seed=3, n=200)
    attrs.to_csv(d / "attrs.csv", index=False)
    labels.to_csv(d / "labels.csv", index=False)
    net.to_csv(d / "net.csv", index=False)
    pairs.to_csv(d / "pairs.csv", index=False)
    write_domain_list(d / "schemes.txt", sorted(schemes))
    write_domain_list(d / "unreliable.txt", labels.loc[labels["reliability"] == "unreliable", "domain"])
    rel = labels.loc[labels["reliability"] == "reliable", "domain"]
    pd.DataFrame({"domain": rel, "favorable": True}).to_csv(d / "outcomes.csv", index=False)
    pd.DataFrame({"domain": ["kind-000000.com"], "category": ["News & Media"]}).to_csv(d / "cats.csv", index=False)
    glabels = pd.read_csv(g / "labels.csv")
    write_domain_list(g / "reliable.txt", glabels.loc[glabels["reliability"] == "reliable", "domain"])
    (d / "out").mkdir()
    return d


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    return build_workspace(tmp_path_factory.mktemp("cli"))


def graph_args(work):
    g = work / "g"
    return ["--vertices", str(g / "vertices.txt"), "--edges", str(g / "edges.txt")]


def commands(w):
    g = w / "g"
    G = graph_args(w)
    o = lambda name: str(w / "out" / name)  # noqa: E731
    return {
        "gen-planted": ["gen-planted", "--reliable", "30", "--mixed", "30", "--unreliable", "30", "--schemes", "5",
                        "--background", "300", "--scheme-out-degree", "40", "--seed", "1", "--out-dir", o("planted")],
        "stats": ["stats", *G, "--out", o("stats.json")],
        "pagerank": ["pagerank", *G, "--out", o("pre.csv"), "--snapshot", o("pre.bin")],
        "ppr": ["ppr", *G, "--seeds", str(g / "reliable.txt"), "--out", o("ppr.csv")],
        "atr": ["atr", *G, "--seeds", str(g / "unreliable.txt"), "--out", o("atr.csv")],
        "inv-ppr": ["inv-ppr", *G, "--exclude", str(g / "unreliable.txt"), "--out", o("inv.csv")],
        "rank": ["rank", "--scores", o("pre.csv"), "--vertices", str(g / "vertices.txt"), "--out", o("rank.csv")],
        "identify-binary": ["identify", "binary", *G, "--unreliable", str(g / "unreliable.txt"),
                            "--beta-min", "15", "--out", o("found.txt")],
        "identify-weighted": ["identify", "weighted", "--network", str(w / "net.csv"), "--labels",
                              str(w / "labels.csv"), "--seed", "42", "--min-volume", "1000",
                              "--out", o("weighted.txt")],
        "atr-extend": ["atr-extend", *G, "--seeds", str(g / "schemes.txt"), "--top-k", "8", "--out", o("ext.txt")],
        "multi-category": ["multi-category", *G, "--seeds-a", str(g / "unreliable.txt"), "--seeds-b",
                           str(g / "schemes.txt"), "--top-k", "5", "--out", o("multi.txt")],
        "intervene-edge": ["intervene", "edge-removal", *G, "--sources", str(g / "schemes.txt"),
                           "--out", o("post_edges.txt"), "--pagerank-out", o("post.csv")],
        "intervene-control": ["intervene", "control", "--attributes", str(w / "attrs.csv"), "--delta", "0.5",
                              "--out", o("control.csv")],
        "multiplicity-score": ["multiplicity-score", "--pairs", str(w / "pairs.csv"), "--out", o("edge_scores.csv")],
        "intervene-multiplicity": ["intervene", "multiplicity", "--attributes", str(w / "attrs.csv"), "--network",
                                   str(w / "net.csv"), "--edge-scores", o("edge_scores.csv"), "--out", o("mult.csv")],
        "intervene-combined": ["intervene", "combined", "--attributes", str(w / "attrs.csv"), "--network",
                               str(w / "net.csv"), "--edge-scores", o("edge_scores.csv"), "--sources",
                               str(w / "schemes.txt"), "--out", o("combined.csv")],
        "fit": ["fit", "--attributes", str(w / "attrs.csv"), "--out", o("model.json")],
        "tune-scale": ["tune-scale", "--pairs", str(w / "pairs.csv"), "--network", str(w / "net.csv"),
                       "--attributes", str(w / "attrs.csv"), "--labels", str(w / "labels.csv"),
                       "--min-upper", "0.1", "--max-upper", "16", "--out", o("tune.json")],
        "eval-small": ["eval-small", "--pre", str(w / "attrs.csv"), "--post", o("combined.csv"), "--labels",
                       str(w / "labels.csv"), "--model", o("model.json"), "--per-domain", o("small_rp.csv"),
                       "--out", o("small.json")],
        "eval-large": ["eval-large", "--pre", o("pre.csv"), "--post", o("post.csv"), "--labels",
                       str(g / "labels.csv"), "--vertices", str(g / "vertices.txt"), "--bins=-1,-0.05,0.05,1",
                       "--histogram", o("hist.csv"), "--affected-out", o("affected.txt"), "--categories",
                       str(w / "cats.csv"), "--per-domain", o("large_rp.csv"), "--out", o("large.json")],
        "debias": ["debias", "--attributes", str(w / "attrs.csv"), "--labels", str(w / "labels.csv"),
                   "--level", "0.5", "--outcomes", str(w / "outcomes.csv"), "--out", o("debiased.csv")],
    }


@pytest.fixture(scope="module")
def runs(work):
    """Run every command twice; return {name: (manifest, first-run bytes)}."""
    results = {}
    for name, argv in commands(work).items():
        assert main([*argv, "--quiet", "--threads", "1"]) == 0, name
        manifest = read_manifest(_manifest_path_for(argv))
        first = {p: Path(p).read_bytes() for p in manifest["outputs"]}
        assert main([*argv, "--quiet", "--threads", "1"]) == 0, name
        results[name] = (manifest, first)
    return results


@pytest.mark.parametrize("name", list(commands(Path("/x"))))
def test_byte_reproducible(runs, name):
    manifest, first = runs[name]
    assert first, "no outputs declared"
    for path, data in first.items():
        assert Path(path).read_bytes() == data, path
        assert manifest["outputs"][path] == file_digest(path)


def test_manifest_content(runs, work):
    manifest, _ = runs["pagerank"]
    assert manifest["command"] == "pagerank"
    assert manifest["params"]["damping"] == 0.85 and manifest["params"]["tol"] == 1e-9
    assert set(manifest["inputs"]) == {str(work / "g" / "vertices.txt"), str(work / "g" / "edges.txt")}
    assert manifest["toolkit_version"]


def test_replay(runs, work):
    path = str(work / "out" / "pre.csv.manifest.json")
    assert main(["replay", path, "--quiet", "--threads", "1"]) == 0


def test_replay_detects_drift(runs, work, tmp_path):
    manifest = json.loads((work / "out" / "stats.json.manifest.json").read_text())
    out = next(iter(manifest["outputs"]))
    manifest["outputs"][out] = "0" * 64
    bad = tmp_path / "m.json"
    bad.write_text(json.dumps(manifest))
    assert main(["replay", str(bad), "--quiet"]) == 2


def test_pagerank_csv_sorted(runs, work):
    names, scores = read_scores_csv(work / "out" / "pre.csv")
    assert list(scores) == sorted(scores, reverse=True)
    assert abs(scores.sum() - 1) < 1e-9


def test_identify_binary_finds_schemes(runs, work):
    found = (work / "out" / "found.txt").read_text().split()
    schemes = (work / "g" / "schemes.txt").read_text().split()
    assert sorted(found) == sorted(schemes)
    meta = json.loads((work / "out" / "found.txt.json").read_text())
    assert meta["count"] == len(schemes)


def test_eval_large_report(runs, work):
    report = json.loads((work / "out" / "large.json").read_text())
    assert report["centrality_ris"] > 0
    assert report["centrality_retention"]["reliable"] > report["centrality_retention"]["unreliable"]


def test_eval_large_without_vertices(runs, work):
    o = work / "out"
    argv = ["eval-large", "--pre", str(o / "pre.csv"), "--post", str(o / "post.csv"), "--labels",
            str(work / "g" / "labels.csv"), "--out", str(o / "large2.json"), "--quiet"]
    assert main(argv) == 0
    a = json.loads((o / "large.json").read_text())
    b = json.loads((o / "large2.json").read_text())
    assert a["centrality_ris"] == pytest.approx(b["centrality_ris"], abs=1e-12)


def test_eval_small_control_ris_zero(runs, work):
    o = work / "out"
    argv = ["eval-small", "--pre", str(work / "attrs.csv"), "--post", str(o / "control.csv"), "--labels",
            str(work / "labels.csv"), "--out", str(o / "ctl.json"), "--quiet"]
    assert main(argv) == 0
    assert abs(json.loads((o / "ctl.json").read_text())["ris"]) < 1e-12


def test_tune_report(runs, work):
    report = json.loads((work / "out" / "tune.json").read_text())
    assert abs(report["group_rp"]["reliable"] - 1) <= 1e-3
    assert report["trace"]


def test_pipeline(work, tmp_path):
    g = graph_args(work)
    steps = [
        ["pagerank", *g, "--out", str(tmp_path / "a.csv"), "--quiet"],
        ["intervene", "edge-removal", *g, "--sources", str(work / "g" / "schemes.txt"),
         "--out", str(tmp_path / "e.txt"), "--pagerank-out", str(tmp_path / "b.csv"), "--quiet"],
        ["eval-large", "--pre", str(tmp_path / "a.csv"), "--post", str(tmp_path / "b.csv"), "--labels",
         str(work / "g" / "labels.csv"), "--out", str(tmp_path / "r.json"), "--quiet"],
    ]
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps(steps))
    assert main(["pipeline", str(plan), "--quiet"]) == 0
    assert json.loads((tmp_path / "r.json").read_text())["centrality_ris"] > 0


def test_gen_planted_deterministic(work, tmp_path):
    argv = ["gen-planted", "--reliable", "40", "--mixed", "40", "--unreliable", "40", "--schemes", "8",
            "--background", "800", "--scheme-out-degree", "60", "--crosslinks", "4", "--seed", "9", "--quiet"]
    assert main([*argv, "--out-dir", str(tmp_path)]) == 0
    for f in ("vertices.txt", "edges.txt", "labels.csv", "schemes.txt", "unreliable.txt"):
        assert (tmp_path / f).read_bytes() == (work / "g" / f).read_bytes()


class TestExitCodes:
    def test_missing_input(self, tmp_path):
        assert main(["pagerank", "--vertices", str(tmp_path / "nope"), "--edges", "x", "--out",
                     str(tmp_path / "o.csv"), "--quiet"]) == 1

    def test_missing_flag(self, capsys):
        assert main(["pagerank", "--quiet"]) == 1
        assert "--vertices" in capsys.readouterr().err

    def test_unknown_flag(self):
        assert main(["stats", "--bogus"]) == 1

    def test_schema_violation_has_line(self, tmp_path, capsys):
        v = tmp_path / "v.txt"
        v.write_text("a\nb\n")
        e = tmp_path / "e.txt"
        e.write_text("0\t1\n0\t9\n")
        assert main(["stats", "--vertices", str(v), "--edges", str(e), "--out", str(tmp_path / "s.json")]) == 1
        assert "e.txt:2" in capsys.readouterr().err

    def test_sampling_requires_seed(self, work, tmp_path):
        assert main(["identify", "weighted", "--network", str(work / "net.csv"), "--labels",
                     str(work / "labels.csv"), "--out", str(tmp_path / "x.txt"), "--quiet"]) == 1

    def test_gen_planted_requires_seed(self, tmp_path):
        assert main(["gen-planted", "--out-dir", str(tmp_path), "--quiet"]) == 1

    def test_bad_threads(self, tmp_path):
        assert main(["stats", "--vertices", "a", "--edges", "b", "--out", "c", "--threads", "0"]) == 1

    def test_bad_pipeline(self, tmp_path):
        plan = tmp_path / "p.json"
        plan.write_text('{"not": "a list"}')
        assert main(["pipeline", str(plan), "--quiet"]) == 1

    def test_failed_step_is_runtime(self, tmp_path):
        plan = tmp_path / "p.json"
        plan.write_text(json.dumps([["stats", "--quiet"]]))
        assert main(["pipeline", str(plan), "--quiet"]) == 2
