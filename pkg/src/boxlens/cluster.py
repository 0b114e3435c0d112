"""Seeded k-means over binary feature vectors, with silhouette-based auto-k.

Squared Euclidean distance on 0/1 vectors is Hamming distance, so k-means
with real-valued centroids groups rows by shared feature configuration.
Everything is driven by one integer seed and is fully deterministic:
k-means++ seeding, assignment ties to the lower cluster id, and empty
clusters reseeded with the point farthest from its centroid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import BINARY, Dataset

MAX_ITER = 100
AUTO_K_CAP = 10

POSITIVE = "positive"
NEGATIVE = "negative"


@dataclass(frozen=True, eq=False)
class Cluster:
    """One group of strong-signal rows with per-feature presence statistics."""

    side: str
    member_indices: np.ndarray
    presence_count: np.ndarray
    presence_fraction: np.ndarray
    label_mix: float

    @property
    def size(self) -> int:
        return self.member_indices.size

    @property
    def absence_fraction(self) -> np.ndarray:
        return 1.0 - self.presence_fraction


def _check_binary(d: Dataset) -> None:
    bad = [m.name for m in d.features if m.kind != BINARY]
    if bad:
        raise ValueError(
            f"clustering requires binary features; binarize column(s) {bad} first"
        )


def cluster_side(
    d: Dataset,
    indices: Sequence[int],
    k: int | str,
    seed: int,
    side: str = POSITIVE,
) -> list[Cluster]:
    """Cluster one side's rows into k groups (k='auto' scans by silhouette).

    Auto-k scans k in [1, min(10, n)] and keeps the highest mean silhouette
    (defined as 0 for k=1), ties to the smaller k.
    """
    _check_binary(d)
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        raise ValueError("cannot cluster an empty index set")
    x = d.rows[indices]
    n = indices.size
    if k == "auto":
        best_k, best_assign, best_score = 1, np.zeros(n, dtype=np.int64), 0.0
        for kk in range(2, min(AUTO_K_CAP, n) + 1):
            assign, _ = _kmeans(x, kk, seed)
            score = _mean_silhouette(x, assign, kk)
            if score > best_score:
                best_k, best_assign, best_score = kk, assign, score
        k, assignment = best_k, best_assign
    else:
        k = int(k)
        if not 1 <= k <= n:
            raise ValueError(f"k must be in [1, {n}], got {k}")
        assignment, _ = _kmeans(x, k, seed)

    clusters = []
    for c in range(k):
        members = indices[assignment == c]
        cols = d.rows[members]
        count = np.count_nonzero(cols, axis=0).astype(np.int64)
        clusters.append(
            Cluster(
                side=side,
                member_indices=members,
                presence_count=count,
                presence_fraction=count / members.size,
                label_mix=float(np.count_nonzero(d.labels[members]) / members.size),
            )
        )
    return clusters


def _kmeans(x: np.ndarray, k: int, seed: int) -> tuple[np.ndarray, list[float]]:
    """Lloyd iterations with k-means++ seeding; returns (assignment, inertia trace)."""
    n = x.shape[0]
    rng = np.random.default_rng(seed)
    centers = _plus_plus_init(x, k, rng)
    prev = None
    inertia_trace: list[float] = []
    assignment = np.zeros(n, dtype=np.int64)
    for _ in range(MAX_ITER):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assignment = np.argmin(d2, axis=1)  # ties -> lower cluster id
        pinned: set[int] = set()
        for c in range(k):
            if (assignment == c).any():
                continue
            own = d2[np.arange(n), assignment]
            own[list(pinned)] = -np.inf
            p = int(np.argmax(own))
            centers[c] = x[p]
            assignment[p] = c
            d2[:, c] = ((x - centers[c]) ** 2).sum(axis=1)
            pinned.add(p)
        inertia_trace.append(float(d2[np.arange(n), assignment].sum()))
        if prev is not None and np.array_equal(assignment, prev):
            break
        prev = assignment.copy()
        for c in range(k):
            members = x[assignment == c]
            if members.size:
                centers[c] = members.mean(axis=0)
    return assignment, inertia_trace


def _plus_plus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    first = int(rng.integers(n))
    centers[0] = x[first]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))  # all remaining points coincide with a center
        centers[j] = x[idx]
        d2 = np.minimum(d2, ((x - centers[j]) ** 2).sum(axis=1))
    return centers


def _mean_silhouette(x: np.ndarray, assignment: np.ndarray, k: int) -> float:
    """Mean silhouette under Euclidean distance; singletons score 0."""
    if k == 1:
        return 0.0
    n = x.shape[0]
    sq = ((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2)
    dist = np.sqrt(np.maximum(sq, 0.0))
    onehot = np.zeros((n, k))
    onehot[np.arange(n), assignment] = 1.0
    sums = dist @ onehot
    counts = onehot.sum(axis=0)
    scores = np.zeros(n)
    for i in range(n):
        c = assignment[i]
        if counts[c] <= 1:
            continue
        a = sums[i, c] / (counts[c] - 1)
        b = np.inf
        for other in range(k):
            if other != c and counts[other] > 0:
                b = min(b, sums[i, other] / counts[other])
        denom = max(a, b)
        if denom > 0:
            scores[i] = (b - a) / denom
    return float(scores.mean())
