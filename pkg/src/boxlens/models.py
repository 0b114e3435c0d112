"""Opaque predictors plus deterministic built-in trainers.

A predictor is anything with a ``score(x) -> float in [0, 1]`` method and a
``descriptor`` string; the inspection and signature modules use nothing
else. The built-in logistic and CART trainers are fully deterministic (no
randomness anywhere), so every downstream artifact is reproducible
bit-for-bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .dataset import Dataset


class TrainingError(ValueError):
    """An optimizer produced a non-finite loss."""


@runtime_checkable
class Predictor(Protocol):
    descriptor: str

    def score(self, x: np.ndarray) -> float: ...


def _sigmoid_scalar(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


@dataclass(frozen=True, eq=False)
class LogisticModel:
    """Linear model through a sigmoid: score(x) = sigmoid(w . x + b)."""

    weights: np.ndarray
    bias: float
    learning_rate: float
    iterations: int
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or not np.isfinite(w).all() or not np.isfinite(self.bias):
            raise ValueError("weights and bias must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def descriptor(self) -> str:
        return f"logistic(lr={self.learning_rate:g}, iters={self.iterations})"

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def score(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.weights.shape:
            raise ValueError(f"expected {self.n_features} features, got {x.size}")
        return _sigmoid_scalar(float(np.dot(self.weights, x)) + self.bias)


@dataclass(frozen=True)
class TreeLeaf:
    value: float
    n: int


@dataclass(frozen=True)
class TreeSplit:
    feature: int
    threshold: float
    left: "TreeSplit | TreeLeaf"
    right: "TreeSplit | TreeLeaf"


@dataclass(frozen=True, eq=False)
class TreeModel:
    """Binary CART tree; leaves score the positive-label fraction of training rows."""

    root: TreeSplit | TreeLeaf
    n_features: int
    max_depth: int
    min_leaf: int
    feature_names: tuple[str, ...] | None = None

    @property
    def descriptor(self) -> str:
        return f"cart(max_depth={self.max_depth}, min_leaf={self.min_leaf})"

    def score(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n_features,):
            raise ValueError(f"expected {self.n_features} features, got {x.size}")
        node = self.root
        while isinstance(node, TreeSplit):
            node = node.left if x[node.feature] < node.threshold else node.right
        return node.value


def predict(model: Predictor, x: Sequence[float]) -> float:
    """Score one feature vector; the result is clamped to [0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("feature vector must be 1-D")
    if not np.isfinite(x).all():
        raise ValueError("feature vector must be finite")
    s = float(model.score(x))
    return min(max(s, 0.0), 1.0)


def predict_batch(model: Predictor, rows: Sequence[Sequence[float]]) -> list[float]:
    """Elementwise predict, order preserved; exactly map(predict, rows)."""
    return [predict(model, row) for row in rows]


def train_logistic(d: Dataset, lr: float, iters: int) -> LogisticModel:
    """Full-batch gradient descent on log-loss from zero-initialized weights.

    Deterministic; duplicating the whole dataset leaves the fit unchanged
    (the gradient is a mean over rows). iters=0 returns the zero model.
    """
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    if iters < 0:
        raise ValueError("iterations must be non-negative")
    if d.has_missing:
        raise ValueError("training requires an imputed dataset")
    x = d.rows
    y = d.labels.astype(np.float64)
    n = d.n_rows
    w = np.zeros(d.n_features)
    b = 0.0
    for t in range(iters):
        p = _sigmoid(x @ w + b)
        with np.errstate(divide="ignore", invalid="ignore"):
            loss = -float(np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))
        if not math.isfinite(loss):
            raise TrainingError(f"log-loss became non-finite at iteration {t}")
        g = p - y
        w = w - lr * (x.T @ g) / n
        b = b - lr * float(np.mean(g))
    names = tuple(m.name for m in d.features)
    return LogisticModel(weights=w, bias=b, learning_rate=lr, iterations=iters, feature_names=names)


def train_tree(d: Dataset, max_depth: int, min_leaf: int) -> TreeModel:
    """Greedy CART on gini impurity.

    Candidate thresholds are midpoints between consecutive sorted distinct
    values; the best split maximizes impurity decrease with ties broken by
    lowest feature index, then lowest threshold. Zero-gain splits are taken
    (a depth-capped tree can still separate XOR-like data); recursion stops
    on pure nodes, at max_depth, or when min_leaf leaves no legal split.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    if d.has_missing:
        raise ValueError("training requires an imputed dataset")
    x = d.rows
    y = d.labels

    def build(idx: np.ndarray, depth: int) -> TreeSplit | TreeLeaf:
        ys = y[idx]
        n = idx.size
        pos = int(ys.sum())
        if pos == 0 or pos == n or depth >= max_depth:
            return TreeLeaf(value=pos / n, n=n)
        best = _best_split(x[idx], ys, min_leaf)
        if best is None:
            return TreeLeaf(value=pos / n, n=n)
        feature, threshold = best
        mask = x[idx, feature] < threshold
        return TreeSplit(
            feature=feature,
            threshold=threshold,
            left=build(idx[mask], depth + 1),
            right=build(idx[~mask], depth + 1),
        )

    root = build(np.arange(d.n_rows), 0)
    names = tuple(m.name for m in d.features)
    return TreeModel(root=root, n_features=d.n_features, max_depth=max_depth, min_leaf=min_leaf, feature_names=names)


def _best_split(xs: np.ndarray, ys: np.ndarray, min_leaf: int) -> tuple[int, float] | None:
    n = ys.size
    total_pos = int(ys.sum())
    p = total_pos / n
    parent = 2.0 * p * (1.0 - p)
    best_decrease = -1.0
    best: tuple[int, float] | None = None
    for f in range(xs.shape[1]):
        order = np.argsort(xs[:, f], kind="stable")
        vals = xs[order, f]
        pos_cum = np.cumsum(ys[order])
        cut = np.nonzero(vals[:-1] != vals[1:])[0]  # split after position i
        if cut.size == 0:
            continue
        n_left = cut + 1
        n_right = n - n_left
        legal = (n_left >= min_leaf) & (n_right >= min_leaf)
        if not legal.any():
            continue
        cut = cut[legal]
        n_left = n_left[legal]
        n_right = n_right[legal]
        pos_left = pos_cum[cut]
        pos_right = total_pos - pos_left
        pl = pos_left / n_left
        pr = pos_right / n_right
        child = (n_left / n) * 2.0 * pl * (1.0 - pl) + (n_right / n) * 2.0 * pr * (1.0 - pr)
        decrease = parent - child
        j = int(np.argmax(decrease))  # first max -> lowest threshold
        if decrease[j] > best_decrease:
            best_decrease = float(decrease[j])
            i = cut[j]
            best = (f, float(0.5 * (vals[i] + vals[i + 1])))
    return best


def model_to_dict(model: Predictor) -> dict:
    """JSON-serializable description of a built-in model."""
    if isinstance(model, LogisticModel):
        return {
            "kind": "logistic",
            "feature_names": list(model.feature_names) if model.feature_names else None,
            "weights": [float(w) for w in model.weights],
            "bias": float(model.bias),
            "learning_rate": model.learning_rate,
            "iterations": model.iterations,
        }
    if isinstance(model, TreeModel):
        return {
            "kind": "cart",
            "feature_names": list(model.feature_names) if model.feature_names else None,
            "n_features": model.n_features,
            "max_depth": model.max_depth,
            "min_leaf": model.min_leaf,
            "root": _node_to_dict(model.root),
        }
    raise ValueError(f"cannot serialize predictor {model.descriptor!r}")


def _node_to_dict(node: TreeSplit | TreeLeaf) -> dict:
    if isinstance(node, TreeLeaf):
        return {"value": node.value, "n": node.n}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(raw: dict) -> TreeSplit | TreeLeaf:
    if "value" in raw:
        return TreeLeaf(value=float(raw["value"]), n=int(raw.get("n", 0)))
    return TreeSplit(
        feature=int(raw["feature"]),
        threshold=float(raw["threshold"]),
        left=_node_from_dict(raw["left"]),
        right=_node_from_dict(raw["right"]),
    )


def model_from_dict(raw: dict) -> LogisticModel | TreeModel:
    kind = raw.get("kind")
    names = tuple(raw["feature_names"]) if raw.get("feature_names") else None
    if kind == "logistic":
        return LogisticModel(
            weights=np.asarray(raw["weights"], dtype=np.float64),
            bias=float(raw["bias"]),
            learning_rate=float(raw.get("learning_rate", 0.0)),
            iterations=int(raw.get("iterations", 0)),
            feature_names=names,
        )
    if kind == "cart":
        return TreeModel(
            root=_node_from_dict(raw["root"]),
            n_features=int(raw["n_features"]),
            max_depth=int(raw["max_depth"]),
            min_leaf=int(raw["min_leaf"]),
            feature_names=names,
        )
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model: Predictor, path: str, seed: int | None = None) -> None:
    doc = model_to_dict(model)
    if seed is not None:
        doc["seed"] = seed
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path: str) -> LogisticModel | TreeModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
