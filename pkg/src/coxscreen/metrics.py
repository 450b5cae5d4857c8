"""Benchmark metrics: minimum model size, true positive rate, aggregation, KDE export."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.stats import gaussian_kde

from .data import ConditioningSet
from .errors import ValidationError


@dataclass(frozen=True)
class ReplicateScore:
    method: str
    replicate_id: int
    mms: int
    tpr: float
    sure_screened: bool


@dataclass(frozen=True)
class BenchmarkSummary:
    method: str
    median_mms: float
    iqr_mms: float
    median_tpr: float
    iqr_tpr: float
    sure_rate: float
    replicates: int


def mms(ranking, true_active, conditioning_penalty=0, conditioning=ConditioningSet()):
    """Smallest ranking prefix covering the active set, plus the conditioning penalty.

    Active variables inside the conditioning set are considered covered by the
    penalty and are not looked up in the ranking.
    """
    cond = set(conditioning.indices)
    targets = set(true_active) - cond
    if not targets:
        return conditioning_penalty
    missing = targets - set(ranking)
    if missing:
        raise ValidationError(f"active variables absent from the ranking: {sorted(missing)}")
    positions = [ranking.index(j) for j in targets]
    return max(positions) + 1 + conditioning_penalty


def tpr(ranking, true_active, n_budget, conditioning=ConditioningSet()):
    """Fraction of active variables inside the conditioning set or the first n_budget ranks."""
    if n_budget < 1:
        raise ValidationError("n_budget must be >= 1")
    active = set(true_active)
    if not active:
        raise ValidationError("true_active is empty")
    found = set(conditioning.indices) | set(ranking[:n_budget])
    return len(active & found) / len(active)


def summarize(scores) -> BenchmarkSummary:
    """Median and IQR (linear-interpolation quartiles) for one method's scores."""
    scores = list(scores)
    if not scores:
        raise ValidationError("no scores to summarize")
    methods = {s.method for s in scores}
    if len(methods) != 1:
        raise ValidationError(f"summarize expects a single method, got {sorted(methods)}")
    mms_vals = np.array([s.mms for s in scores], dtype=float)
    tpr_vals = np.array([s.tpr for s in scores], dtype=float)

    def med_iqr(vals):
        q1, q2, q3 = np.percentile(vals, [25, 50, 75])
        return float(q2), float(q3 - q1)

    m_med, m_iqr = med_iqr(mms_vals)
    t_med, t_iqr = med_iqr(tpr_vals)
    return BenchmarkSummary(
        method=scores[0].method,
        median_mms=m_med,
        iqr_mms=m_iqr,
        median_tpr=t_med,
        iqr_tpr=t_iqr,
        sure_rate=float(np.mean([s.sure_screened for s in scores])),
        replicates=len(scores),
    )


def density_table(groups, grid=None, grid_size=512):
    """Gaussian KDE (Silverman bandwidth) per group on a shared grid.

    groups maps a label to a 1-d sample. Returns (rows, point_masses) where
    rows are (group, x, density) tuples and point_masses lists degenerate
    (zero-variance) groups that were skipped.
    """
    arrays = {name: np.asarray(vals, dtype=float) for name, vals in groups.items()}
    for name, vals in arrays.items():
        if vals.size < 2:
            raise ValidationError(f"group '{name}' needs at least 2 values")
    point_masses = [name for name, vals in arrays.items() if np.ptp(vals) == 0.0]
    live = {name: vals for name, vals in arrays.items() if name not in point_masses}
    if grid is None and live:
        spread = max(vals.std() for vals in live.values())
        lo = min(vals.min() for vals in live.values()) - 4.0 * spread
        hi = max(vals.max() for vals in live.values()) + 4.0 * spread
        grid = np.linspace(lo, hi, grid_size)
    rows = []
    for name in sorted(live):
        kde = gaussian_kde(live[name], bw_method="silverman")
        density = kde(grid)
        for x, d in zip(grid, density):
            rows.append((name, float(x), float(d)))
    return rows, point_masses


def density_table_to_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "x", "density"])
        for group, x, d in rows:
            writer.writerow([group, repr(x), repr(d)])


def summaries_to_csv(summaries, path, config_id=""):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["method", "config_id", "median_mms", "iqr_mms", "median_tpr", "iqr_tpr", "sure_rate", "replicates"]
        )
        for s in summaries:
            writer.writerow(
                [s.method, config_id, repr(s.median_mms), repr(s.iqr_mms), repr(s.median_tpr),
                 repr(s.iqr_tpr), repr(s.sure_rate), s.replicates]
            )


def scores_to_csv(scores, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "replicate_id", "mms", "tpr", "sure_screened"])
        for s in scores:
            writer.writerow([s.method, s.replicate_id, s.mms, repr(s.tpr), int(s.sure_screened)])
