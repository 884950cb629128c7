"""Simulated interventions on the backlink attribute and regression-based
retention (RP) / Reliability Impact Score (RIS) evaluation."""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
import pandas as pd

from .labels import RELIABILITY
from .regression import RegressionModel

BACKLINKS = "backlinks"


def reliability_impact_score(rp_unreliable: float, rp_mixed: float, rp_reliable: float) -> float:
    """RIS = RP(reliable) - (RP(unreliable) + RP(mixed)) / 2."""
    return rp_reliable - (rp_unreliable + rp_mixed) / 2.0


def _with_backlinks(attrs: pd.DataFrame, new_x1: np.ndarray) -> pd.DataFrame:
    out = attrs.copy()
    out[BACKLINKS] = np.maximum(1.0, new_x1)
    return out


def apply_control(attrs: pd.DataFrame, delta: float) -> pd.DataFrame:
    """Uniformly drop a fraction ``delta`` of every domain's backlinks."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must be in [0, 1]")
    return _with_backlinks(attrs, attrs[BACKLINKS].to_numpy(dtype=np.float64) * (1.0 - delta))


def _per_target(net: pd.DataFrame, weights: pd.Series, domains: pd.Series) -> np.ndarray:
    totals = weights.groupby(net["target"]).sum()
    return domains.map(totals).fillna(0.0).to_numpy(dtype=np.float64)


def apply_linkscheme_removal(attrs: pd.DataFrame, net: pd.DataFrame, schemes: Iterable[str]) -> pd.DataFrame:
    """Subtract every backlink sent by a scheme source from its target."""
    schemes = set(schemes)
    from_scheme = net["source"].isin(schemes)
    removed = _per_target(
        net.loc[from_scheme], net.loc[from_scheme, "backlinks"].astype(np.float64), attrs["domain"]
    )
    return _with_backlinks(attrs, attrs[BACKLINKS].to_numpy(dtype=np.float64) - removed)


def apply_multiplicity_reweight(
    attrs: pd.DataFrame,
    net: pd.DataFrame,
    edge_scores: pd.DataFrame,
    skip_sources: Iterable[str] = (),
) -> pd.DataFrame:
    """Reweight network-covered backlinks by their edge score.

    Each covered edge s->d with weight w and score e shifts X1(d) by
    ``w * (e - 1)``; uncovered edges and off-network backlinks are untouched.
    """
    scored = net.merge(edge_scores[["source", "target", "score"]], on=["source", "target"], how="inner")
    skip = set(skip_sources)
    if skip:
        scored = scored.loc[~scored["source"].isin(skip)]
    shift = scored["backlinks"].astype(np.float64) * (scored["score"].astype(np.float64) - 1.0)
    delta = _per_target(scored, shift, attrs["domain"])
    return _with_backlinks(attrs, attrs[BACKLINKS].to_numpy(dtype=np.float64) + delta)


@dataclass(frozen=True)
class Control:
    delta: float


@dataclass(frozen=True, eq=False)
class LinkSchemeRemoval:
    net: pd.DataFrame
    schemes: frozenset


@dataclass(frozen=True, eq=False)
class MultiplicityReweight:
    net: pd.DataFrame
    edge_scores: pd.DataFrame


Intervention = Union[Control, LinkSchemeRemoval, MultiplicityReweight]


def compose_interventions(attrs: pd.DataFrame, steps: Sequence[Intervention]) -> pd.DataFrame:
    """Apply steps left to right. Multiplicity reweighting skips edges whose
    source an earlier step already removed as a link scheme."""
    removed: set[str] = set()
    out = attrs
    for step in steps:
        if isinstance(step, Control):
            out = apply_control(out, step.delta)
        elif isinstance(step, LinkSchemeRemoval):
            out = apply_linkscheme_removal(out, step.net, step.schemes)
            removed |= set(step.schemes)
        elif isinstance(step, MultiplicityReweight):
            out = apply_multiplicity_reweight(out, step.net, step.edge_scores, skip_sources=removed)
        else:
            raise TypeError(f"unknown intervention {step!r}")
    return out


@dataclass(frozen=True, eq=False)
class RetentionReport:
    per_domain: pd.DataFrame  # domain, label, rp
    group_rp: dict
    group_sizes: dict
    ris: float
    clamped: int = 0
    excluded: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "group_rp": self.group_rp,
            "group_sizes": self.group_sizes,
            "ris": self.ris,
            "clamped": self.clamped,
            "excluded": self.excluded,
            **self.extra,
        }


def group_retention(per_domain: pd.DataFrame, value: str = "rp") -> tuple[dict, dict, float]:
    """Mean of ``value`` per reliability label and the resulting RIS."""
    means, sizes = {}, {}
    for label in RELIABILITY:
        vals = per_domain.loc[per_domain["label"] == label, value]
        sizes[label] = int(len(vals))
        # fsum is correctly rounded, so the means are reproducible exactly
        # from the per-domain table regardless of summation order
        means[label] = math.fsum(vals) / len(vals) if len(vals) else float("nan")
    ris = reliability_impact_score(means["unreliable"], means["mixed"], means["reliable"])
    return means, sizes, ris


def predict_retention(
    model: RegressionModel, pre: pd.DataFrame, post: pd.DataFrame, labels: pd.DataFrame
) -> RetentionReport:
    """Per-domain RP = y_hat(post) / y_hat(pre), averaged per reliability."""
    a = pre.set_index("domain")
    b = post.set_index("domain")
    if len(a) != len(b) or not a.index.isin(b.index).all():
        raise ValueError("pre and post attribute tables cover different domains")
    b = b.loc[a.index]
    regs = list(model.regressors)
    xa = a[regs].to_numpy(dtype=np.float64)
    xb = b[regs].to_numpy(dtype=np.float64)
    ok = np.all((xa > 0) & (xb > 0) & np.isfinite(xa) & np.isfinite(xb), axis=1)
    # intercept cancels in the ratio; work with log differences directly
    log_ratio = (np.log(xb[ok]) - np.log(xa[ok])) @ model.coefficients
    rp = np.exp(log_ratio)

    label_of = labels.set_index("domain")["reliability"]
    domains = a.index[ok]
    per_domain = pd.DataFrame(
        {"domain": domains, "label": domains.map(label_of).fillna("").to_numpy(), "rp": rp}
    )
    means, sizes, ris = group_retention(per_domain)
    clamped = 0
    if BACKLINKS in a.columns:
        clamped = int(((b[BACKLINKS] <= 1.0) & (a[BACKLINKS] > 1.0)).sum())
    return RetentionReport(per_domain, means, sizes, ris, clamped=clamped, excluded=int((~ok).sum()))
