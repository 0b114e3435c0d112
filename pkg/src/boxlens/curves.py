"""Threshold sweeps over prediction scores: ROC, precision/recall, accuracy.

Classification at threshold t predicts positive iff score >= t, so all
items tied at one score flip together. Thresholds are the descending unique
scores; AUC is the trapezoid over (fpr, tpr) with (0, 0) prepended, which
equals the Mann-Whitney pair statistic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class CurveSet:
    """Per-threshold rates at every descending unique score."""

    thresholds: np.ndarray
    tpr: np.ndarray
    fpr: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    accuracy: np.ndarray
    auc: float


@dataclass(frozen=True)
class ContingencyMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def _validate(labels: Sequence[int], scores: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(labels, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape or labels.ndim != 1 or labels.size < 1:
        raise ValueError("labels and scores must be equal-length non-empty 1-D sequences")
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    if not np.isfinite(scores).all():
        raise ValueError("scores must be finite")
    return labels, scores


def score_curves(
    labels: Sequence[int],
    scores: Sequence[float],
    allow_single_class: bool = False,
) -> CurveSet:
    """Sweep descending unique thresholds and compute per-threshold rates.

    Single-class label sets leave the ROC undefined; by default that raises.
    With ``allow_single_class=True`` the undefined rates and the AUC come
    back as NaN while precision and accuracy stay usable.
    """
    labels, scores = _validate(labels, scores)
    n = labels.size
    n_pos = int(labels.sum())
    n_neg = n - n_pos
    if (n_pos == 0 or n_neg == 0) and not allow_single_class:
        raise ValueError("ROC undefined: labels contain a single class")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    tp_cum = np.cumsum(labels[order])
    fp_cum = np.cumsum(1 - labels[order])
    last = np.nonzero(sorted_scores[:-1] != sorted_scores[1:])[0]
    idx = np.concatenate([last, [n - 1]])

    thresholds = sorted_scores[idx]
    tp = tp_cum[idx]
    fp = fp_cum[idx]
    with np.errstate(invalid="ignore", divide="ignore"):
        tpr = tp / n_pos if n_pos else np.full(idx.size, np.nan)
        fpr = fp / n_neg if n_neg else np.full(idx.size, np.nan)
        precision = tp / (tp + fp)
    accuracy = (tp + (n_neg - fp)) / n
    if n_pos and n_neg:
        auc = float(np.trapezoid(np.concatenate([[0.0], tpr]), np.concatenate([[0.0], fpr])))
    else:
        auc = float("nan")
    return CurveSet(
        thresholds=thresholds,
        tpr=tpr,
        fpr=fpr,
        precision=precision,
        recall=tpr,
        accuracy=accuracy,
        auc=auc,
    )


def contingency_at(labels: Sequence[int], scores: Sequence[float], t: float) -> ContingencyMatrix:
    """Exact TP/FP/TN/FN counts at one threshold (positive iff score >= t)."""
    labels, scores = _validate(labels, scores)
    predicted = scores >= t
    actual = labels == 1
    tp = int(np.count_nonzero(predicted & actual))
    fp = int(np.count_nonzero(predicted & ~actual))
    fn = int(np.count_nonzero(~predicted & actual))
    tn = int(np.count_nonzero(~predicted & ~actual))
    return ContingencyMatrix(tp=tp, fp=fp, tn=tn, fn=fn)
