"""Disparate impact and rank-preserving quantile repair of attribute columns
(the "disparate impact remover" construction)."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from .errors import InputError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroupSpec:
    attribute: str = "bias"
    privileged: str = "extreme-left"
    unprivileged: str = "extreme-right"
    favorable: str = "reliable"

    def __post_init__(self):
        if self.privileged == self.unprivileged:
            raise ValueError("privileged and unprivileged groups must differ")


def disparate_impact(outcomes: pd.Series, groups: GroupSpec, labels: pd.DataFrame) -> float:
    """P(favorable | unprivileged) / P(favorable | privileged).

    ``outcomes`` maps domain -> bool (favorable flag). Returns ``inf`` with a
    warning when the privileged group has no favorable outcomes.
    """
    group_of = labels.set_index("domain")[groups.attribute]
    g = outcomes.index.map(group_of)
    fav = outcomes.astype(bool).to_numpy()
    rates = {}
    for name in (groups.unprivileged, groups.privileged):
        mask = np.asarray(g == name)
        if not mask.any():
            raise ValueError(f"group {name!r} has no rows with outcomes")
        rates[name] = fav[mask].mean()
    if rates[groups.privileged] == 0:
        log.warning("privileged group has zero favorable rate; disparate impact is unbounded")
        return math.inf
    return float(rates[groups.unprivileged] / rates[groups.privileged])


def favorable_outcomes(labels: pd.DataFrame, groups: GroupSpec) -> pd.Series:
    """Favorable flag per labelled domain taken from the reliability label."""
    return pd.Series(
        (labels["reliability"] == groups.favorable).to_numpy(), index=labels["domain"].to_numpy()
    )


def _quantile_positions(values: np.ndarray) -> np.ndarray:
    """Within-group quantile in [0, 1]; ties share their average rank."""
    n = len(values)
    if n == 1:
        return np.array([0.5])
    return (rankdata(values, method="average") - 1.0) / (n - 1.0)


def _median_distribution(sorted_groups: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Median across groups of each group's quantile function, sampled on a
    common grid with as many points as the smallest group."""
    m = min(len(s) for s in sorted_groups)
    grid = np.array([0.5]) if m == 1 else np.linspace(0.0, 1.0, m)
    per_group = np.vstack([np.quantile(s, grid) if len(s) > 1 else np.full(m, s[0]) for s in sorted_groups])
    return grid, np.median(per_group, axis=0)


def repair_attributes(
    attrs: pd.DataFrame,
    groups: GroupSpec,
    labels: pd.DataFrame,
    level: float,
    columns,
) -> pd.DataFrame:
    """Move each value a fraction ``level`` of the way toward the median
    distribution's value at its within-group quantile.

    Only rows labelled with the privileged or unprivileged group are
    repaired; every other row passes through untouched.
    """
    if not 0.0 <= level <= 1.0:
        raise ValueError("repair level must be in [0, 1]")
    unknown = [c for c in columns if c not in attrs.columns]
    if unknown:
        raise InputError(f"unknown column(s): {', '.join(unknown)}")
    out = attrs.copy()
    if level == 0.0:
        return out
    group_of = labels.set_index("domain")[groups.attribute]
    g = attrs["domain"].map(group_of).to_numpy()
    masks = [g == groups.privileged, g == groups.unprivileged]
    if not all(m.any() for m in masks):
        raise ValueError("both groups need at least one row to repair")
    for col in columns:
        values = attrs[col].to_numpy(dtype=np.float64)
        grid, median = _median_distribution([np.sort(values[m]) for m in masks])
        repaired = values.copy()
        for m in masks:
            q = _quantile_positions(values[m])
            target = np.interp(q, grid, median) if len(grid) > 1 else np.full(len(q), median[0])
            repaired[m] = (1.0 - level) * values[m] + level * target
        out[col] = repaired
    return out


def repair_audit(before: pd.DataFrame, after: pd.DataFrame, groups: GroupSpec, labels: pd.DataFrame, level: float, columns) -> dict:
    """Per-column, per-group summary of how far repair moved the values."""
    group_of = labels.set_index("domain")[groups.attribute]
    g = before["domain"].map(group_of).to_numpy()
    report = {"repair_level": level, "groups": [groups.privileged, groups.unprivileged], "columns": {}}
    for col in columns:
        entry = {}
        for name in (groups.privileged, groups.unprivileged):
            m = g == name
            a = before.loc[m, col].to_numpy(dtype=np.float64)
            b = after.loc[m, col].to_numpy(dtype=np.float64)
            entry[name] = {
                "rows": int(m.sum()),
                "median_before": float(np.median(a)) if len(a) else None,
                "median_after": float(np.median(b)) if len(b) else None,
                "mean_abs_shift": float(np.abs(b - a).mean()) if len(a) else None,
            }
        report["columns"][col] = entry
    report["passed_through"] = int((~np.isin(g, [groups.privileged, groups.unprivileged])).sum())
    return report
