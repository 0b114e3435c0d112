"""Signature pipeline: score, contrast-filter, cluster each side, rank features.

Rows are scored by the black-box model, strong positives (score >= tau_pos)
and strong negatives (score <= tau_neg) are kept while the middle band is
dropped, each side is clustered separately over its binary features, and
every (cluster, feature) pair gets a discriminativeness score: the
normalized gini impurity decrease of splitting cluster membership on that
feature, measured one-vs-rest across the clusters of both sides.

Gini arithmetic runs on exact integer counts via fractions, so hand-sized
fixtures reproduce their rational values exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cluster import Cluster, NEGATIVE, POSITIVE, cluster_side, _check_binary
from .dataset import Dataset
from .models import Predictor, predict_batch
from .tsne import project_items


class EmptySideError(ValueError):
    """Contrast filtering left one side without any items."""


@dataclass(frozen=True)
class ThresholdPair:
    """Score cutoffs for strong positives and strong negatives."""

    tau_pos: float
    tau_neg: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.tau_neg <= 1.0 and 0.0 <= self.tau_pos <= 1.0):
            raise ValueError("thresholds must lie in [0, 1]")
        if self.tau_pos < self.tau_neg:
            raise ValueError(
                f"tau_pos ({self.tau_pos}) must be >= tau_neg ({self.tau_neg})"
            )


@dataclass(frozen=True, eq=False)
class SignatureMatrix:
    """Clusters with per-feature discriminativeness and a 2-D projection."""

    clusters: tuple[Cluster, ...]
    discriminativeness: np.ndarray
    projection: np.ndarray
    retained_indices: np.ndarray
    thresholds: ThresholdPair
    k_pos: int
    k_neg: int
    seed: int


def contrast_filter(
    d: Dataset,
    scores: Sequence[float],
    tp: ThresholdPair,
) -> tuple[np.ndarray, np.ndarray]:
    """Split row indices into strong positives and strong negatives.

    The middle band (tau_neg, tau_pos) is dropped. When the thresholds
    coincide, boundary items go to the positive side only, so the result is
    still a partition.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (d.n_rows,):
        raise ValueError("need one score per dataset row")
    positives = np.nonzero(scores >= tp.tau_pos)[0]
    if tp.tau_neg < tp.tau_pos:
        negatives = np.nonzero(scores <= tp.tau_neg)[0]
    else:
        negatives = np.nonzero(scores < tp.tau_neg)[0]
    return positives, negatives


def rank_discriminative(all_clusters: Sequence[Cluster], f: int, c: int) -> float:
    """Normalized gini decrease of splitting membership-in-cluster-c on feature f.

    Items are the union of all clusters' members; the split children are
    the items with the feature present versus absent. A pure parent (the
    cluster is everything or nothing) scores 0.
    """
    if not 0 <= c < len(all_clusters):
        raise ValueError(f"cluster id {c} out of range")
    n = sum(cl.size for cl in all_clusters)
    in_c = all_clusters[c].size
    present_total = sum(int(cl.presence_count[f]) for cl in all_clusters)
    present_in_c = int(all_clusters[c].presence_count[f])

    parent = _gini(in_c, n)
    if parent == 0:
        return 0.0
    child_present = _gini(present_in_c, present_total)
    child_absent = _gini(in_c - present_in_c, n - present_total)
    weighted = (
        Fraction(present_total, n) * child_present
        + Fraction(n - present_total, n) * child_absent
    )
    return float((parent - weighted) / parent)


def _gini(members: int, total: int) -> Fraction:
    """2 p (1 - p) with p = members / total, as an exact fraction."""
    if total == 0:
        return Fraction(0)
    p = Fraction(members, total)
    return 2 * p * (1 - p)


def build_signatures(
    d: Dataset,
    model: Predictor,
    tp: ThresholdPair,
    k_pos: int | str,
    k_neg: int | str,
    seed: int,
    perplexity: float = 30.0,
) -> SignatureMatrix:
    """Run the full pipeline: score, contrast, cluster per side, rank, project."""
    _check_binary(d)
    scores = predict_batch(model, d.rows)
    positives, negatives = contrast_filter(d, scores, tp)
    if positives.size == 0:
        raise EmptySideError(
            "no rows scored at or above tau_pos; relax the thresholds"
        )
    if negatives.size == 0:
        raise EmptySideError(
            "no rows scored at or below tau_neg; relax the thresholds"
        )
    pos_clusters = cluster_side(d, positives, k_pos, seed, side=POSITIVE)
    neg_clusters = cluster_side(d, negatives, k_neg, seed, side=NEGATIVE)
    clusters = tuple(pos_clusters + neg_clusters)

    disc = np.empty((len(clusters), d.n_features))
    for c in range(len(clusters)):
        for f in range(d.n_features):
            disc[c, f] = rank_discriminative(clusters, f, c)

    retained = np.sort(np.concatenate([positives, negatives]))
    projection = project_items(d.rows[retained], seed, perplexity)
    return SignatureMatrix(
        clusters=clusters,
        discriminativeness=disc,
        projection=projection,
        retained_indices=retained,
        thresholds=tp,
        k_pos=len(pos_clusters),
        k_neg=len(neg_clusters),
        seed=seed,
    )


def signature_to_dict(sm: SignatureMatrix) -> dict:
    """Wire/export form; ``projection[i]`` belongs to ``retained[i]``."""
    return {
        "clusters": [
            {
                "side": cl.side,
                "members": [int(i) for i in cl.member_indices],
                "presence": [float(p) for p in cl.presence_fraction],
                "label_mix": cl.label_mix,
            }
            for cl in sm.clusters
        ],
        "discriminativeness": [[float(v) for v in row] for row in sm.discriminativeness],
        "projection": [[float(a), float(b)] for a, b in sm.projection],
        "retained": [int(i) for i in sm.retained_indices],
        "thresholds": {"tau_pos": sm.thresholds.tau_pos, "tau_neg": sm.thresholds.tau_neg},
        "k_pos": sm.k_pos,
        "k_neg": sm.k_neg,
        "seed": sm.seed,
    }
