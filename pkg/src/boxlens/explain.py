"""Black-box inspection: partial dependence, ICE sweeps, and what-if probing.

Everything here reads the model exclusively through ``score`` and never
mutates the dataset. A partial dependence value at grid point v is the mean
prediction over all rows with feature f forced to v; an ICE curve is the
same sweep anchored at a single row.

The local importance metric is a Gaussian-weighted mean absolute ICE
deviation: per feature, deviations of the sweep from the anchor's own score
are averaged with weights centered on the anchor's current value (bandwidth
= the column's standard deviation). Binary features use uniform weights.
This is a deliberate reconstruction: it depends only on partial-dependence
style sweeps and emphasizes nearby, reachable values.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dataset import Dataset, FeatureMeta, Histogram, BINARY, feature_grid, histogram, snap_value
from .models import LogisticModel, Predictor, predict, predict_batch

INCREASE = "increase"
DECREASE = "decrease"

SORT_MODES = ("importance", "impactful", "index", "weight")


@dataclass(frozen=True, eq=False)
class PdpCurve:
    """Global sweep: mean prediction over all rows at each grid value."""

    feature: int
    grid: np.ndarray
    values: np.ndarray
    histogram: Histogram


@dataclass(frozen=True, eq=False)
class IceCurve:
    """Single-row sweep: prediction of the anchor with feature f swapped to each grid value."""

    feature: int
    anchor_row: np.ndarray
    grid: np.ndarray
    values: np.ndarray
    anchor_score: float


@dataclass(frozen=True, eq=False)
class LocalImportanceReport:
    anchor_row: np.ndarray
    importance: np.ndarray
    bandwidth: np.ndarray


@dataclass(frozen=True)
class ImpactfulChange:
    """Best single-feature substitution toward an objective.

    ``direction`` describes what the change does to the score; it matches
    the sign of ``delta`` (or the objective when delta is exactly zero).
    """

    feature: int
    current_value: float
    suggested_value: float
    delta: float
    direction: str


def _require_imputed(d: Dataset) -> None:
    if d.has_missing:
        raise ValueError("operation requires an imputed dataset")


def partial_dependence(model: Predictor, d: Dataset, f: int) -> PdpCurve:
    """Sweep feature f over its grid, averaging predictions over all rows.

    The dataset itself is kept fixed; only a working copy has column f
    overwritten per grid value.
    """
    _require_imputed(d)
    meta = d.features[f]
    grid = feature_grid(meta)
    work = d.rows.copy()
    values = np.empty(grid.size)
    for j, v in enumerate(grid):
        work[:, f] = v
        values[j] = np.mean(np.asarray(predict_batch(model, work)))
    hist = histogram(d, f, grid.size)
    return PdpCurve(feature=f, grid=grid, values=values, histogram=hist)


def ice_curve(model: Predictor, anchor: Sequence[float], f: int, grid: Sequence[float]) -> IceCurve:
    """Predict the anchor row with cell f replaced by each grid value."""
    anchor = np.asarray(anchor, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    work = anchor.copy()
    values = np.empty(grid.size)
    for j, v in enumerate(grid):
        work[f] = v
        values[j] = predict(model, work)
    return IceCurve(
        feature=f,
        anchor_row=anchor,
        grid=grid,
        values=values,
        anchor_score=predict(model, anchor),
    )


def local_importance(model: Predictor, d: Dataset, anchor: Sequence[float]) -> LocalImportanceReport:
    """Gaussian-weighted mean absolute ICE deviation, per feature.

    importance_f = sum_j w_j |ice_f(v_j) - score(anchor)| / sum_j w_j with
    w_j = exp(-(v_j - anchor_f)^2 / (2 sigma_f^2)), sigma_f = max(std of
    column f, 1e-9). Binary features use uniform weights. A constant
    predictor scores zero everywhere.
    """
    _require_imputed(d)
    anchor = np.asarray(anchor, dtype=np.float64)
    importance = np.empty(d.n_features)
    bandwidth = np.empty(d.n_features)
    for meta in d.features:
        f = meta.index
        sigma = max(float(np.std(d.rows[:, f])), 1e-9)
        bandwidth[f] = sigma
        curve = ice_curve(model, anchor, f, feature_grid(meta))
        dev = np.abs(curve.values - curve.anchor_score)
        if meta.kind == BINARY:
            weights = np.ones_like(curve.grid)
        else:
            weights = np.exp(-((curve.grid - anchor[f]) ** 2) / (2.0 * sigma * sigma))
        importance[f] = float(np.sum(weights * dev) / np.sum(weights))
    return LocalImportanceReport(anchor_row=anchor, importance=importance, bandwidth=bandwidth)


def impactful_changes(
    model: Predictor,
    d: Dataset,
    anchor: Sequence[float],
    objective: str,
) -> list[ImpactfulChange]:
    """Best single-feature substitutions, sorted by |delta| descending.

    Per feature the suggested value maximizes s * (ice(v) - score(anchor))
    over the feasible grid, s = +1 to increase and -1 to decrease; ties go
    to the value closest to the current one, then to the smaller value.
    """
    if objective not in (INCREASE, DECREASE):
        raise ValueError(f"objective must be '{INCREASE}' or '{DECREASE}'")
    _require_imputed(d)
    anchor = np.asarray(anchor, dtype=np.float64)
    sign = 1.0 if objective == INCREASE else -1.0
    changes = []
    for meta in d.features:
        f = meta.index
        curve = ice_curve(model, anchor, f, feature_grid(meta))
        gains = sign * (curve.values - curve.anchor_score)
        best_gain = gains.max()
        best_j = None
        for j in range(curve.grid.size):
            if gains[j] != best_gain:
                continue
            if best_j is None or abs(curve.grid[j] - anchor[f]) < abs(curve.grid[best_j] - anchor[f]):
                best_j = j  # ascending grid: first of equal distances is the smaller value
        delta = float(curve.values[best_j] - curve.anchor_score)
        if delta > 0:
            direction = INCREASE
        elif delta < 0:
            direction = DECREASE
        else:
            direction = objective
        changes.append(
            ImpactfulChange(
                feature=f,
                current_value=float(anchor[f]),
                suggested_value=float(curve.grid[best_j]),
                delta=delta,
                direction=direction,
            )
        )
    changes.sort(key=lambda c: (-abs(c.delta), c.feature))
    return changes


def what_if(
    model: Predictor,
    anchor: Sequence[float],
    overrides: Mapping[str, float],
    features: Sequence[FeatureMeta],
) -> tuple[np.ndarray, float]:
    """Apply value overrides with snapping and score the result.

    Requested values outside the feasible region snap to the nearest
    feasible value (ties -> smaller); the returned vector shows what was
    actually evaluated.
    """
    vec = np.array(anchor, dtype=np.float64)
    by_name = {meta.name: meta for meta in features}
    for name, value in overrides.items():
        meta = by_name.get(name)
        if meta is None:
            raise ValueError(f"unknown feature {name!r}")
        vec[meta.index] = snap_value(meta, value)
    return vec, predict(model, vec)


def feature_order(
    mode: str,
    *,
    importance: LocalImportanceReport | None = None,
    changes: Sequence[ImpactfulChange] | None = None,
    model: Predictor | None = None,
    d: Dataset | None = None,
) -> list[int]:
    """Feature index ordering for presentation.

    Modes: "importance" (descending local importance), "impactful" (|delta|
    descending), "index", and "weight" (|w_f| * std_f, logistic models
    only, since trees carry no canonical per-feature weight).
    """
    if mode == "index":
        if d is None:
            raise ValueError("index order needs the dataset")
        return list(range(d.n_features))
    if mode == "importance":
        if importance is None:
            raise ValueError("importance order needs a LocalImportanceReport")
        imp = importance.importance
        return sorted(range(imp.size), key=lambda f: (-imp[f], f))
    if mode == "impactful":
        if changes is None:
            raise ValueError("impactful order needs the change list")
        return [c.feature for c in changes]
    if mode == "weight":
        if not isinstance(model, LogisticModel):
            raise ValueError("weight order is only available for logistic models")
        if d is None:
            raise ValueError("weight order needs the dataset")
        scale = np.abs(model.weights) * np.std(d.rows, axis=0)
        return sorted(range(scale.size), key=lambda f: (-scale[f], f))
    raise ValueError(f"unknown sort mode {mode!r}; expected one of {SORT_MODES}")


def model_weight_scale(model: Predictor, d: Dataset) -> np.ndarray | None:
    """Per-feature |w_f| * std_f for logistic models, else None."""
    if isinstance(model, LogisticModel):
        return np.abs(model.weights) * np.std(d.rows, axis=0)
    return None


def write_curve_csv(path: str, curve: PdpCurve | IceCurve) -> None:
    """Curve export: header ``grid_value,pdp`` or ``grid_value,ice``."""
    label = "pdp" if isinstance(curve, PdpCurve) else "ice"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grid_value", label])
        for v, y in zip(curve.grid, curve.values):
            writer.writerow([repr(float(v)), repr(float(y))])


def write_histogram_csv(path: str, hist: Histogram) -> None:
    """Histogram sidecar: rows of (bin_lo, bin_hi, count).

    Binary histograms emit point-mass rows with bin_lo == bin_hi.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lo", "bin_hi", "count"])
        if hist.bin_edges.size == hist.counts.size:  # binary: one edge per tally
            for v, c in zip(hist.bin_edges, hist.counts):
                writer.writerow([repr(float(v)), repr(float(v)), int(c)])
        else:
            for i, c in enumerate(hist.counts):
                writer.writerow([repr(float(hist.bin_edges[i])), repr(float(hist.bin_edges[i + 1])), int(c)])
