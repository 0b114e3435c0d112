import json

import numpy as np
import pytest

from boxlens import Dataset, impute_missing


class CountingPredictor:
    """Wraps a scorer exposing nothing but score/descriptor; tallies calls."""

    def __init__(self, fn, descriptor="counting"):
        self._fn = fn
        self.descriptor = descriptor
        self.calls = 0

    def score(self, x):
        self.calls += 1
        return self._fn(x)


class ConstantPredictor:
    def __init__(self, value):
        self._value = value
        self.descriptor = f"constant({value})"

    def score(self, x):
        return self._value


class LinearPredictor:
    """Raw linear scorer (no sigmoid); keep outputs in [0, 1] by construction."""

    def __init__(self, weights, bias):
        self.weights = np.asarray(weights, dtype=float)
        self.bias = float(bias)
        self.descriptor = "linear"

    def score(self, x):
        return float(np.dot(self.weights, np.asarray(x, dtype=float)) + self.bias)


@pytest.fixture
def small_numeric_dataset():
    rng = np.random.default_rng(7)
    rows = rng.uniform(0.0, 1.0, size=(40, 3))
    labels = (rows[:, 0] > 0.5).astype(int)
    return impute_missing(Dataset.from_arrays(rows, labels))


@pytest.fixture
def binary_dataset():
    rng = np.random.default_rng(11)
    rows = (rng.uniform(size=(30, 4)) < 0.5).astype(float)
    labels = rows[:, 0].astype(int)
    return impute_missing(Dataset.from_arrays(rows, labels, kinds=["binary"] * 4))


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_schema(path, schema):
    path.write_text(json.dumps(schema), encoding="utf-8")
