"""Link multiplicity scoring: count repeated (source domain, destination URL)
links, map them to inverted minmax scores and average per network edge."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from urllib.parse import urlsplit

import numpy as np
import pandas as pd

from .io import read_csv, require_columns
from .regression import RegressionModel
from .smallscale import apply_multiplicity_reweight, predict_retention

log = logging.getLogger(__name__)

DROPPED_SUFFIXES = (".jpg", ".png", ".css", ".js")


@dataclass(frozen=True)
class ScaleParams:
    lower: float = 0.0
    upper: float = 2.0

    def __post_init__(self):
        if self.lower < 0:
            raise ValueError("lower must be >= 0")
        if not self.upper > self.lower:
            raise ValueError("upper must exceed lower")


def filter_url_pairs(df: pd.DataFrame) -> tuple[pd.DataFrame, int]:
    require_columns(df, ["source_domain", "source_url", "dest_url"])
    df = df[["source_domain", "source_url", "dest_url"]]
    drop = df["dest_url"].str.lower().str.endswith(DROPPED_SUFFIXES)
    return df.loc[~drop].reset_index(drop=True), int(drop.sum())


def ingest_url_pairs(path) -> tuple[pd.DataFrame, int]:
    """Load ``source_domain,source_url,dest_url`` rows, dropping asset URLs.

    Returns the kept rows and the number of dropped rows.
    """
    df = read_csv(path, dtype=str, keep_default_na=False)
    require_columns(df, ["source_domain", "source_url", "dest_url"], path)
    kept, dropped = filter_url_pairs(df)
    log.info("url pairs: kept %d, dropped %d asset links", len(kept), dropped)
    return kept, dropped


def compute_multiplicity(pairs: pd.DataFrame) -> pd.DataFrame:
    """Exact row count per (source_domain, dest_url)."""
    return (
        pairs.groupby(["source_domain", "dest_url"], sort=True)
        .size()
        .rename("multiplicity")
        .reset_index()
    )


def score_multiplicity(m: pd.DataFrame, scale: ScaleParams = ScaleParams()) -> pd.DataFrame:
    """Inverted minmax: the lowest multiplicity maps to ``upper``, the
    highest to ``lower``. A table of equal multiplicities maps to the
    midpoint."""
    if m.empty:
        raise ValueError("multiplicity table is empty")
    mult = m["multiplicity"].to_numpy(dtype=np.float64)
    hi, lo = mult.max(), mult.min()
    if hi == lo:
        score = np.full(len(mult), (scale.lower + scale.upper) / 2.0)
    else:
        score = scale.lower + (scale.upper - scale.lower) * (hi - mult) / (hi - lo)
    out = m.copy()
    out["score"] = score
    return out


def dest_domain(url: str) -> str:
    host = urlsplit(url if "//" in url else "//" + url).hostname or ""
    return host[4:] if host.startswith("www.") else host


def aggregate_edge_scores(pair_scores: pd.DataFrame, scale: ScaleParams = ScaleParams()) -> pd.DataFrame:
    """Mean pair score per (source domain, destination domain) edge."""
    df = pair_scores.assign(target=pair_scores["dest_url"].map(dest_domain))
    out = (
        df.groupby(["source_domain", "target"], sort=True)["score"]
        .mean()
        .reset_index()
        .rename(columns={"source_domain": "source"})
    )
    # guard against float drift past the bounds
    out["score"] = out["score"].clip(scale.lower, scale.upper)
    return out


@dataclass(frozen=True)
class TuningResult:
    scale: ScaleParams
    group_rp: dict
    ris: float
    trace: list

    def to_dict(self) -> dict:
        return {
            "scale": {"lower": self.scale.lower, "upper": self.scale.upper},
            "group_rp": self.group_rp,
            "ris": self.ris,
            "trace": self.trace,
        }


def tune_scale(
    unit_edge_scores: pd.DataFrame,
    net: pd.DataFrame,
    attrs: pd.DataFrame,
    model: RegressionModel,
    labels: pd.DataFrame,
    target_group: str = "reliable",
    bracket: tuple[float, float] = (0.1, 16.0),
    start: float = 2.0,
    tol: float = 1e-3,
    max_steps: int = 100,
) -> TuningResult:
    """Bisect the upper scale bound (lower pinned at 0) until the mean RP of
    ``target_group`` equals 1 within ``tol``.

    ``unit_edge_scores`` are edge scores computed at scale (0, 1); with the
    lower bound at 0, scores at scale (0, u) are exactly ``u`` times these.
    The default scale ``start`` is tried first and kept if already in
    tolerance.
    """
    if (labels["reliability"] == target_group).sum() == 0:
        raise ValueError(f"no labelled {target_group!r} domains")
    trace = []

    def evaluate(upper):
        scores = unit_edge_scores.assign(score=unit_edge_scores["score"] * upper)
        post = apply_multiplicity_reweight(attrs, net, scores)
        report = predict_retention(model, attrs, post, labels)
        trace.append({"upper": upper, "rp": report.group_rp[target_group]})
        return report

    lo, hi = bracket
    if lo <= start <= hi:
        r0 = evaluate(start)
        if abs(r0.group_rp[target_group] - 1.0) <= tol:
            return TuningResult(ScaleParams(0.0, start), r0.group_rp, r0.ris, trace)
    r_lo, r_hi = evaluate(lo), evaluate(hi)
    f_lo = r_lo.group_rp[target_group] - 1.0
    f_hi = r_hi.group_rp[target_group] - 1.0
    if abs(f_lo) <= tol:
        return TuningResult(ScaleParams(0.0, lo), r_lo.group_rp, r_lo.ris, trace)
    if abs(f_hi) <= tol:
        return TuningResult(ScaleParams(0.0, hi), r_hi.group_rp, r_hi.ris, trace)
    if np.sign(f_lo) == np.sign(f_hi):
        raise ValueError(
            f"RP({target_group}) - 1 not bracketed on upper in [{lo}, {hi}]: {f_lo:+.4f}, {f_hi:+.4f}"
        )
    for _ in range(max_steps):
        mid = (lo + hi) / 2.0
        r_mid = evaluate(mid)
        f_mid = r_mid.group_rp[target_group] - 1.0
        if abs(f_mid) <= tol:
            return TuningResult(ScaleParams(0.0, mid), r_mid.group_rp, r_mid.ris, trace)
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    raise ValueError("bisection did not converge")
