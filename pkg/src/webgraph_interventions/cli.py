"""Command-line entry point (``wgi``).

Every subcommand writes its declared outputs plus a run manifest
(``<primary output>.manifest.json`` unless ``--manifest`` is given).
Exit status: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .errors import InputError
from .fairness import GroupSpec, disparate_impact, repair_attributes, repair_audit
from .graph import (
    VertexTable,
    WebGraph,
    degree_stats,
    filter_weighted_edges,
    load_edges,
    load_vertices,
    load_weighted_network,
    remove_outlinks,
)
from .io import (
    open_text,
    read_csv,
    read_domain_list,
    read_scores_csv,
    write_csv,
    write_domain_list,
    write_scores_binary,
    write_scores_csv,
)
from .labels import load_labels, resolve_ids
from .largescale import (
    affected_domains,
    categorize,
    change_distribution,
    load_categories,
    retention_report,
)
from .linkscheme import (
    SchemeThresholds,
    atr_extend,
    identify_link_schemes,
    identify_link_schemes_binary,
    multi_category_intersect,
    sample_labels,
    top_k_by_score,
)
from .manifest import build_manifest, read_manifest, write_json
from .multiplicity import (
    ScaleParams,
    aggregate_edge_scores,
    compute_multiplicity,
    ingest_url_pairs,
    score_multiplicity,
    tune_scale,
)
from .planted import PlantedGraphSpec, generate_planted_graph
from .ranking import (
    RankingParams,
    anti_trustrank,
    default_threads,
    inverse_ppr,
    pagerank,
    personalized_pagerank,
    rank_positions,
)
from .regression import THREE_VARIABLE_MODEL, RegressionModel, fit_loglog_regression, load_attributes
from .smallscale import (
    Control,
    LinkSchemeRemoval,
    MultiplicityReweight,
    apply_control,
    apply_linkscheme_removal,
    apply_multiplicity_reweight,
    compose_interventions,
    predict_retention,
)

log = logging.getLogger("webgraph_interventions")

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- helpers ----------------------------------------------------------------


def _load_graph(args) -> tuple[VertexTable, WebGraph]:
    vertices = load_vertices(args.vertices)
    return vertices, load_edges(args.edges, vertices)


def _params(args) -> RankingParams:
    try:
        return RankingParams(args.damping, args.tol, args.max_iter)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _resolve_list(vertices, path, what) -> frozenset[int]:
    names = read_domain_list(path)
    ids, missing = resolve_ids(vertices, names)
    if missing:
        log.warning("%d %s name(s) not in vertex table", len(missing), what)
    if not ids:
        raise InputError(f"no {what} names resolved against the vertex table", path=path)
    return ids


def _write_set(path, vertices, ids, meta):
    names = sorted(vertices.name_of(i) for i in ids)
    write_domain_list(path, names)
    write_json(f"{path}.json", {**meta, "count": len(names)})
    return [path, f"{path}.json"]


def _write_edges(path, g: WebGraph):
    df = pd.DataFrame(g.edge_array())
    with open_text(path, "wt") as fh:
        fh.write(df.to_csv(sep="\t", header=False, index=False, lineterminator="\n"))


def _ranking_outputs(args, vertices, result):
    write_scores_csv(args.out, vertices.names, result.scores)
    outs = [args.out]
    if args.snapshot:
        write_scores_binary(args.snapshot, result.scores)
        outs.append(args.snapshot)
    log.info("iterations=%d residual=%.3e", result.iterations_used, result.residual)
    return outs


def _scores_by_vertex(path, vertices: VertexTable) -> np.ndarray:
    names, values = read_scores_csv(path)
    if len(names) != len(vertices):
        raise InputError(f"score file has {len(names)} rows, vertex table {len(vertices)}", path=path)
    out = np.empty(len(vertices))
    for name, v in zip(names, values):
        i = vertices.get(name)
        if i is None:
            raise InputError(f"domain {name!r} not in vertex table", path=path)
        out[i] = v
    return out


# --- subcommands -----------------------------------------------------------


def cmd_stats(args):
    vertices, g = _load_graph(args)
    stats = degree_stats(g)
    write_json(args.out, stats.__dict__)
    return [args.vertices, args.edges], [args.out]


def cmd_pagerank(args):
    vertices, g = _load_graph(args)
    result = pagerank(g, _params(args), threads=args.threads)
    return [args.vertices, args.edges], _ranking_outputs(args, vertices, result)


def cmd_ppr(args):
    vertices, g = _load_graph(args)
    seeds = _resolve_list(vertices, args.seeds, "seed")
    result = personalized_pagerank(g, seeds, _params(args), threads=args.threads)
    return [args.vertices, args.edges, args.seeds], _ranking_outputs(args, vertices, result)


def cmd_atr(args):
    vertices, g = _load_graph(args)
    seeds = _resolve_list(vertices, args.seeds, "seed")
    result = anti_trustrank(g, seeds, _params(args), threads=args.threads)
    return [args.vertices, args.edges, args.seeds], _ranking_outputs(args, vertices, result)


def cmd_inv_ppr(args):
    vertices, g = _load_graph(args)
    excluded = _resolve_list(vertices, args.exclude, "excluded")
    try:
        result = inverse_ppr(g, excluded, _params(args), threads=args.threads)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return [args.vertices, args.edges, args.exclude], _ranking_outputs(args, vertices, result)


def cmd_rank(args):
    if args.vertices:
        vertices = load_vertices(args.vertices)
        scores = _scores_by_vertex(args.scores, vertices)
        names = vertices.names
    else:
        names, scores = read_scores_csv(args.scores)
    pos = rank_positions(scores)
    order = np.argsort(pos, kind="stable")
    write_csv(args.out, pd.DataFrame({"domain": [names[i] for i in order], "position": pos[order]}))
    return [args.scores] + ([args.vertices] if args.vertices else []), [args.out]


def cmd_identify(args):
    if args.mode == "weighted":
        if not args.network:
            raise InputError("identify weighted needs --network")
        net = load_weighted_network(args.network)
        net = filter_weighted_edges(net, args.min_backlinks, args.min_ref_pages)
        inputs = [args.network]
        meta = {}
        if args.labels:
            labels = load_labels(args.labels)
            if args.seed is None:
                raise InputError("--labels sampling requires an explicit --seed")
            sample = sample_labels(labels, "unreliable", args.sample_fraction, args.seed)
            unreliable = sample["domain"].tolist()
            inputs.append(args.labels)
            meta["sampled_unreliable"] = len(unreliable)
        elif args.unreliable:
            unreliable = read_domain_list(args.unreliable)
            inputs.append(args.unreliable)
        else:
            raise InputError("give --unreliable or --labels")
        try:
            t = SchemeThresholds(args.min_volume, args.min_breadth)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        found = identify_link_schemes(net, unreliable, t, exclude_unreliable=args.exclude_unreliable)
        names = sorted(found)
        write_domain_list(args.out, names)
        meta.update(
            mode="weighted",
            min_total_backlinks_to_unreliable=t.min_total_backlinks_to_unreliable,
            min_distinct_unreliable_targets=t.min_distinct_unreliable_targets,
            min_backlinks=args.min_backlinks,
            min_ref_pages=args.min_ref_pages,
            network_edges=len(net),
            count=len(names),
        )
        write_json(f"{args.out}.json", meta)
        return inputs, [args.out, f"{args.out}.json"]

    if not (args.vertices and args.edges and args.unreliable):
        raise InputError("identify binary needs --vertices, --edges and --unreliable")
    vertices, g = _load_graph(args)
    names = read_domain_list(args.unreliable)
    unreliable, missing = resolve_ids(vertices, names)
    if args.beta_min < 1:
        raise InputError("--beta-min must be >= 1")
    found = identify_link_schemes_binary(g, unreliable, args.beta_min)
    if args.exclude_unreliable:
        found = found - unreliable
    meta = {
        "mode": "binary",
        "beta_min": args.beta_min,
        "unreliable_resolved": len(unreliable),
        "unresolved": sorted(missing),
    }
    outs = _write_set(args.out, vertices, found, meta)
    return [args.vertices, args.edges, args.unreliable], outs


def cmd_atr_extend(args):
    vertices, g = _load_graph(args)
    seeds = _resolve_list(vertices, args.seeds, "seed")
    top_k, threshold = args.top_k, args.threshold
    if top_k is None and threshold is None:
        threshold = 1e-4
    try:
        ext = atr_extend(g, seeds, _params(args), top_k=top_k, score_threshold=threshold, threads=args.threads)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    meta = {"seeds": len(seeds), "top_k": top_k, "score_threshold": threshold}
    return [args.vertices, args.edges, args.seeds], _write_set(args.out, vertices, ext, meta)


def cmd_multi_category(args):
    vertices, g = _load_graph(args)
    a = _resolve_list(vertices, args.seeds_a, "seed")
    b = _resolve_list(vertices, args.seeds_b, "seed")
    params = _params(args)
    sa = anti_trustrank(g, a, params, threads=args.threads)
    sb = anti_trustrank(g, b, params, threads=args.threads)
    both = multi_category_intersect(sa, sb, args.tau)
    meta = {"tau": args.tau, "intersection": len(both), "top_k": args.top_k}
    if args.top_k and both:
        rerun = anti_trustrank(g, both, params, threads=args.threads)
        chosen = top_k_by_score(rerun, min(args.top_k, g.node_count))
    else:
        chosen = both
    if args.intersection_out:
        write_domain_list(args.intersection_out, sorted(vertices.name_of(i) for i in both))
    outs = _write_set(args.out, vertices, chosen, meta)
    if args.intersection_out:
        outs.append(args.intersection_out)
    return [args.vertices, args.edges, args.seeds_a, args.seeds_b], outs


def cmd_intervene(args):
    kind = args.kind
    if kind == "edge-removal" and args.edges:
        vertices, g = _load_graph(args)
        if not args.sources:
            raise InputError("edge-removal on a graph needs --sources")
        sources = _resolve_list(vertices, args.sources, "source")
        post = remove_outlinks(g, sources)
        _write_edges(args.out, post)
        outs = [args.out]
        inputs = [args.vertices, args.edges, args.sources]
        if args.pagerank_out:
            result = pagerank(post, _params(args), threads=args.threads)
            write_scores_csv(args.pagerank_out, vertices.names, result.scores)
            outs.append(args.pagerank_out)
        return inputs, outs

    if not args.attributes:
        raise InputError(f"intervene {kind} needs --attributes (or --edges for graph edge removal)")
    attrs = load_attributes(args.attributes)
    inputs = [args.attributes]

    def network():
        if not args.network:
            raise InputError(f"intervene {kind} needs --network")
        inputs.append(args.network)
        return load_weighted_network(args.network)

    def schemes():
        if not args.sources:
            raise InputError(f"intervene {kind} needs --sources")
        inputs.append(args.sources)
        return frozenset(read_domain_list(args.sources))

    def edge_scores():
        if not args.edge_scores:
            raise InputError(f"intervene {kind} needs --edge-scores")
        inputs.append(args.edge_scores)
        df = read_csv(args.edge_scores, dtype={"source": str, "target": str}, keep_default_na=False)
        if not {"source", "target", "score"} <= set(df.columns):
            raise InputError("edge score CSV needs source,target,score", path=args.edge_scores)
        return df

    if kind == "control":
        if args.delta is None or not 0 <= args.delta <= 1:
            raise InputError("control needs --delta in [0, 1]")
        post = apply_control(attrs, args.delta)
    elif kind == "edge-removal":
        post = apply_linkscheme_removal(attrs, network(), schemes())
    elif kind == "multiplicity":
        post = apply_multiplicity_reweight(attrs, network(), edge_scores())
    else:
        net = network()
        post = compose_interventions(
            attrs, [LinkSchemeRemoval(net, schemes()), MultiplicityReweight(net, edge_scores())]
        )
    write_csv(args.out, post)
    return inputs, [args.out]


def cmd_multiplicity_score(args):
    try:
        scale = ScaleParams(args.lower, args.upper)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    pairs, dropped = ingest_url_pairs(args.pairs)
    mult = compute_multiplicity(pairs)
    if mult.empty:
        raise InputError("no URL pairs left after filtering", path=args.pairs)
    scored = score_multiplicity(mult, scale)
    edges = aggregate_edge_scores(scored, scale)
    write_csv(args.out, edges[["source", "target", "score"]])
    outs = [args.out]
    if args.pair_scores_out:
        write_csv(args.pair_scores_out, scored)
        outs.append(args.pair_scores_out)
    write_json(
        f"{args.out}.json",
        {"rows_kept": len(pairs), "rows_dropped": dropped, "pairs": len(mult), "edges": len(edges),
         "lower": scale.lower, "upper": scale.upper},
    )
    outs.append(f"{args.out}.json")
    return [args.pairs], outs


def _regressors(args):
    return [c.strip() for c in args.regressors.split(",") if c.strip()]


def _model(args, attrs):
    if args.model:
        return RegressionModel.from_dict(json.loads(Path(args.model).read_text(encoding="utf-8")))
    try:
        return fit_loglog_regression(attrs, args.dependent, _regressors(args))
    except (ValueError, KeyError) as exc:
        raise InputError(str(exc)) from None


def cmd_tune_scale(args):
    attrs = load_attributes(args.attributes)
    labels = load_labels(args.labels)
    net = load_weighted_network(args.network)
    pairs, _ = ingest_url_pairs(args.pairs)
    unit = aggregate_edge_scores(score_multiplicity(compute_multiplicity(pairs), ScaleParams(0.0, 1.0)), ScaleParams(0.0, 1.0))
    model = _model(args, attrs)
    result = tune_scale(unit, net, attrs, model, labels, args.target, bracket=(args.min_upper, args.max_upper))
    write_json(args.out, result.to_dict())
    inputs = [args.attributes, args.labels, args.network, args.pairs] + ([args.model] if args.model else [])
    return inputs, [args.out]


def cmd_fit(args):
    attrs = load_attributes(args.attributes)
    model = _model(args, attrs)
    write_json(args.out, model.to_dict())
    return [args.attributes], [args.out]


def cmd_eval_small(args):
    pre = load_attributes(args.pre)
    post = load_attributes(args.post)
    labels = load_labels(args.labels)
    model = _model(args, pre)
    try:
        report = predict_retention(model, pre, post, labels)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    write_json(args.out, {**report.to_dict(), "model": model.to_dict()})
    outs = [args.out]
    if args.per_domain:
        write_csv(args.per_domain, report.per_domain)
        outs.append(args.per_domain)
    inputs = [args.pre, args.post, args.labels] + ([args.model] if args.model else [])
    return inputs, outs


def cmd_eval_large(args):
    labels = load_labels(args.labels)
    if args.vertices:
        vertices = load_vertices(args.vertices)
        pre = _scores_by_vertex(args.pre, vertices)
        post = _scores_by_vertex(args.post, vertices)
    else:
        names, pre = read_scores_csv(args.pre)
        vertices = VertexTable(tuple(names))
        post = _scores_by_vertex(args.post, vertices)
    try:
        report = retention_report(pre, post, labels, vertices)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    summary = report.to_dict()
    outs = [args.out]
    if args.bins:
        edges = [float(x) for x in args.bins.split(",")]
        try:
            hist = change_distribution(pre, post, edges)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        summary["change_distribution"] = {"below": hist.below, "above": hist.above, "zero_pre": hist.zero_pre}
        if args.histogram:
            write_csv(args.histogram, hist.to_frame())
            outs.append(args.histogram)
    affected = affected_domains(pre, post, args.min_pre, args.min_drop)
    summary["affected"] = {"min_pre": args.min_pre, "min_drop": args.min_drop, "count": len(affected)}
    inputs = [args.pre, args.post, args.labels] + ([args.vertices] if args.vertices else [])
    if args.affected_out:
        write_domain_list(args.affected_out, sorted(vertices.name_of(i) for i in affected))
        outs.append(args.affected_out)
    if args.categories:
        cats = load_categories(args.categories)
        summary["affected"]["categories"] = categorize(
            sorted(vertices.name_of(i) for i in affected), cats
        )
        inputs.append(args.categories)
    write_json(args.out, summary)
    if args.per_domain:
        write_csv(args.per_domain, report.per_domain.drop(columns=["label"]))
        outs.append(args.per_domain)
    return inputs, outs


def cmd_debias(args):
    attrs = load_attributes(args.attributes)
    labels = load_labels(args.labels)
    columns = [c.strip() for c in args.columns.split(",") if c.strip()]
    groups = GroupSpec(privileged=args.privileged, unprivileged=args.unprivileged)
    if not 0 <= args.level <= 1:
        raise InputError("--level must be in [0, 1]")
    repaired = repair_attributes(attrs, groups, labels, args.level, columns)
    write_csv(args.out, repaired)
    audit = repair_audit(attrs, repaired, groups, labels, args.level, columns)
    inputs = [args.attributes, args.labels]
    if args.outcomes:
        df = read_csv(args.outcomes, dtype={"domain": str}, keep_default_na=False)
        if not {"domain", "favorable"} <= set(df.columns):
            raise InputError("outcome CSV needs domain,favorable", path=args.outcomes)
        flags = pd.Series(df["favorable"].astype(str).str.lower().isin(["1", "true", "yes"]).to_numpy(),
                          index=df["domain"].to_numpy())
        di = disparate_impact(flags, groups, labels)
        audit["disparate_impact"] = None if math.isinf(di) else di
        inputs.append(args.outcomes)
    write_json(f"{args.out}.audit.json", audit)
    return inputs, [args.out, f"{args.out}.audit.json"]


def cmd_gen_planted(args):
    try:
        spec = PlantedGraphSpec(
            args.reliable, args.mixed, args.unreliable, args.schemes, args.background,
            args.scheme_out_degree, args.skew, args.seed,
            background_out_degree=args.background_out_degree,
            scheme_crosslinks=args.crosslinks,
        )
        planted = generate_planted_graph(spec)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {k: out / f for k, f in [("vertices", "vertices.txt"), ("edges", "edges.txt"),
                                      ("labels", "labels.csv"), ("schemes", "schemes.txt"),
                                      ("unreliable", "unreliable.txt")]}
    with open_text(paths["vertices"], "wt") as fh:
        for i, name in enumerate(planted.vertices.names):
            fh.write(f"{i}\t{name}\n")
    _write_edges(paths["edges"], planted.graph)
    write_csv(paths["labels"], planted.labels.assign(bias=planted.labels["bias"].fillna("")))
    write_domain_list(paths["schemes"], sorted(planted.vertices.name_of(i) for i in planted.schemes))
    write_domain_list(
        paths["unreliable"], planted.labels.loc[planted.labels["reliability"] == "unreliable", "domain"]
    )
    return [], [str(p) for p in paths.values()]


def cmd_replay(args):
    manifest = read_manifest(args.manifest)
    argv = manifest["argv"]
    code = main(argv)
    if code != EXIT_OK:
        return [args.manifest], []
    fresh = read_manifest(_manifest_path_for(argv))
    diffs = [p for p, d in manifest["outputs"].items() if fresh["outputs"].get(p) != d]
    if diffs:
        raise RuntimeError(f"replay outputs differ: {', '.join(diffs)}")
    log.info("replay reproduced %d output(s)", len(manifest["outputs"]))
    return None


def cmd_pipeline(args):
    steps = json.loads(Path(args.file).read_text(encoding="utf-8"))
    if not isinstance(steps, list):
        raise InputError("pipeline file must hold a JSON list of steps", path=args.file)
    for n, step in enumerate(steps, start=1):
        argv = step["argv"] if isinstance(step, dict) else step
        if not isinstance(argv, list) or not all(isinstance(a, str) for a in argv):
            raise InputError(f"step {n} is not a list of strings", path=args.file)
        log.info("pipeline step %d: %s", n, " ".join(argv))
        code = main(argv)
        if code != EXIT_OK:
            raise RuntimeError(f"pipeline step {n} failed with exit status {code}")
    return None


# --- parser ------------------------------------------------------------------


def _add_graph(p, required=True):
    p.add_argument("--vertices", required=required, help="vertex file (id<TAB>name or name per line)")
    p.add_argument("--edges", required=required, help="edge file (src<TAB>dst per line)")


def _add_ranking(p):
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-9, help="L1 convergence tolerance")
    p.add_argument("--max-iter", type=int, default=200)


def _add_model(p):
    p.add_argument("--model", help="model JSON from `fit`; otherwise fit on the pre table")
    p.add_argument("--dependent", default="traffic", choices=["traffic", "rank"])
    p.add_argument("--regressors", default=",".join(THREE_VARIABLE_MODEL))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wgi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress progress logging")
    common.add_argument("--threads", type=int, default=None, help="worker threads (1 = serial)")
    common.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=func)
        return p

    p = add("stats", cmd_stats, help="graph size and dangling-node statistics")
    _add_graph(p)
    p.add_argument("--out", required=True)

    for name, func, extra in [
        ("pagerank", cmd_pagerank, None),
        ("ppr", cmd_ppr, "--seeds"),
        ("atr", cmd_atr, "--seeds"),
        ("inv-ppr", cmd_inv_ppr, "--exclude"),
    ]:
        p = add(name, func, help=f"{name} scores")
        _add_graph(p)
        _add_ranking(p)
        if extra:
            p.add_argument(extra, required=True, help="newline-delimited domain list")
        p.add_argument("--out", required=True, help="domain,score CSV")
        p.add_argument("--snapshot", help="optional binary score snapshot")

    p = add("rank", cmd_rank, help="ordinal positions from a score CSV")
    p.add_argument("--scores", required=True)
    p.add_argument("--vertices", help="vertex file (ids define the tie order)")
    p.add_argument("--out", required=True)

    p = add("identify", cmd_identify, help="identify link-scheme domains")
    p.add_argument("mode", choices=["weighted", "binary"])
    _add_graph(p, required=False)
    p.add_argument("--network", help="weighted backlink CSV (weighted mode)")
    p.add_argument("--unreliable", help="unreliable domain list")
    p.add_argument("--labels", help="label CSV to sample unreliable seeds from (weighted mode)")
    p.add_argument("--sample-fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int)
    p.add_argument("--min-volume", type=int, default=100_000, help="min total backlinks to unreliable targets")
    p.add_argument("--min-breadth", type=int, default=2, help="min distinct unreliable targets")
    p.add_argument("--min-backlinks", type=int, default=0, help="edge filter: min backlinks")
    p.add_argument("--min-ref-pages", type=int, default=0, help="edge filter: min referring pages")
    p.add_argument("--beta-min", type=int, default=200, help="binary mode: min distinct unreliable targets")
    p.add_argument("--exclude-unreliable", action="store_true")
    p.add_argument("--out", required=True)

    p = add("atr-extend", cmd_atr_extend, help="extend a seed list by Anti-TrustRank")
    _add_graph(p)
    _add_ranking(p)
    p.add_argument("--seeds", required=True)
    sel = p.add_mutually_exclusive_group()
    sel.add_argument("--top-k", type=int)
    sel.add_argument("--threshold", type=float, help="score threshold (default 1e-4)")
    p.add_argument("--out", required=True)

    p = add("multi-category", cmd_multi_category, help="multi-category ATR link schemes")
    _add_graph(p)
    _add_ranking(p)
    p.add_argument("--seeds-a", required=True)
    p.add_argument("--seeds-b", required=True)
    p.add_argument("--tau", type=float, default=1e-4)
    p.add_argument("--top-k", type=int, default=1000, help="0 keeps just the intersection")
    p.add_argument("--intersection-out")
    p.add_argument("--out", required=True)

    p = add("intervene", cmd_intervene, help="apply an intervention")
    p.add_argument("kind", choices=["edge-removal", "multiplicity", "control", "combined"])
    _add_graph(p, required=False)
    _add_ranking(p)
    p.add_argument("--sources", help="link-scheme domain list")
    p.add_argument("--pagerank-out", help="also write post-intervention PageRank (graph mode)")
    p.add_argument("--attributes", help="attribute CSV (small-scale mode)")
    p.add_argument("--network", help="weighted backlink CSV")
    p.add_argument("--edge-scores", help="source,target,score CSV")
    p.add_argument("--delta", type=float)
    p.add_argument("--out", required=True)

    p = add("multiplicity-score", cmd_multiplicity_score, help="edge scores from URL pairs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--lower", type=float, default=0.0)
    p.add_argument("--upper", type=float, default=2.0)
    p.add_argument("--pair-scores-out")
    p.add_argument("--out", required=True)

    p = add("tune-scale", cmd_tune_scale, help="tune the multiplicity upper bound")
    p.add_argument("--pairs", required=True)
    p.add_argument("--network", required=True)
    p.add_argument("--attributes", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--target", default="reliable", choices=["reliable", "mixed", "unreliable"])
    p.add_argument("--min-upper", type=float, default=0.1)
    p.add_argument("--max-upper", type=float, default=16.0)
    _add_model(p)
    p.add_argument("--out", required=True)

    p = add("fit", cmd_fit, help="fit a log-log regression")
    p.add_argument("--attributes", required=True)
    p.add_argument("--dependent", default="traffic", choices=["traffic", "rank"])
    p.add_argument("--regressors", default=",".join(THREE_VARIABLE_MODEL))
    p.set_defaults(model=None)
    p.add_argument("--out", required=True)

    p = add("eval-small", cmd_eval_small, help="regression-based retention and RIS")
    p.add_argument("--pre", required=True)
    p.add_argument("--post", required=True)
    p.add_argument("--labels", required=True)
    _add_model(p)
    p.add_argument("--per-domain")
    p.add_argument("--out", required=True)

    p = add("eval-large", cmd_eval_large, help="PageRank retention and RIS")
    p.add_argument("--pre", required=True)
    p.add_argument("--post", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--vertices")
    p.add_argument("--bins", help="comma-separated relative-change bin edges")
    p.add_argument("--histogram")
    p.add_argument("--min-pre", type=float, default=1e-7)
    p.add_argument("--min-drop", type=float, default=0.5)
    p.add_argument("--affected-out")
    p.add_argument("--categories")
    p.add_argument("--per-domain")
    p.add_argument("--out", required=True)

    p = add("debias", cmd_debias, help="disparate impact repair")
    p.add_argument("--attributes", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--columns", default=",".join(THREE_VARIABLE_MODEL))
    p.add_argument("--privileged", default="extreme-left")
    p.add_argument("--unprivileged", default="extreme-right")
    p.add_argument("--outcomes", help="domain,favorable CSV for a disparate impact reading")
    p.add_argument("--out", required=True)

    p = add("gen-planted", cmd_gen_planted, help="synthetic planted link-scheme graph")
    p.add_argument("--reliable", type=int, default=250)
    p.add_argument("--mixed", type=int, default=250)
    p.add_argument("--unreliable", type=int, default=250)
    p.add_argument("--schemes", type=int, default=50)
    p.add_argument("--background", type=int, default=99_200)
    p.add_argument("--scheme-out-degree", type=int, default=500)
    p.add_argument("--background-out-degree", type=int, default=10)
    p.add_argument("--crosslinks", type=int, default=0)
    p.add_argument("--skew", type=float, default=0.9)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)

    p = add("replay", cmd_replay, help="re-run a manifest and check output digests")
    p.add_argument("manifest")

    p = add("pipeline", cmd_pipeline, help="run a JSON list of subcommand argv lists")
    p.add_argument("file")
    return parser


def _manifest_path_for(argv) -> str:
    args = build_parser().parse_args(argv)
    return _manifest_path(args)


def _manifest_path(args) -> str:
    if args.manifest:
        return args.manifest
    if getattr(args, "out", None):
        return f"{args.out}.manifest.json"
    return str(Path(args.out_dir) / "manifest.json")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    if not logging.getLogger().handlers:
        logging.basicConfig(format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    log.setLevel(logging.WARNING if args.quiet else logging.INFO)
    if args.threads is None:
        args.threads = default_threads()
    elif args.threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        io_paths = args.func(args)
        if io_paths is not None:
            inputs, outputs = io_paths
            params = {k: v for k, v in vars(args).items() if k not in ("func", "quiet", "manifest")}
            write_json(_manifest_path(args), build_manifest(args.command, argv, params, inputs, outputs))
    except (InputError, UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - top-level reporting
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
