"""Exact t-SNE for small item sets, tuned for deterministic output.

This is the quadratic (non-approximated) variant: full pairwise squared
Euclidean affinities, a per-point bisection search for the bandwidth that
matches the requested perplexity, symmetrized joint probabilities, and
plain momentum gradient descent. All hyperparameters are fixed so a given
seed always reproduces the same coordinates bit-for-bit:

- bisection: 50 iterations, entropy tolerance 1e-5
- 500 gradient iterations, learning rate 100
- early exaggeration x4 for the first 100 iterations
- momentum 0.5, switching to 0.8 after iteration 250
- init: seeded Gaussian, std 1e-2
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

N_ITER = 500
EXAGGERATION = 4.0
EXAGGERATION_ITERS = 100
LEARNING_RATE = 100.0
MOMENTUM_EARLY = 0.5
MOMENTUM_LATE = 0.8
MOMENTUM_SWITCH = 250
BISECTION_STEPS = 50
BISECTION_TOL = 1e-5
P_FLOOR = 1e-12


def project_items(rows: Sequence[Sequence[float]], seed: int, perplexity: float = 30.0) -> np.ndarray:
    """Embed rows into 2-D; deterministic for a fixed seed.

    Perplexity is auto-reduced to (n - 1) / 3 when the item set is small.
    A single row maps to the origin.
    """
    x = np.asarray(rows, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("rows must be a non-empty 2-D array")
    n = x.shape[0]
    if n == 1:
        return np.zeros((1, 2))
    perplexity = min(float(perplexity), (n - 1) / 3.0)

    p = _joint_probabilities(x, perplexity)
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((n, 2)) * 1e-2
    update = np.zeros_like(y)
    for it in range(N_ITER):
        p_eff = p * EXAGGERATION if it < EXAGGERATION_ITERS else p
        grad = _gradient(p_eff, y)
        momentum = MOMENTUM_EARLY if it < MOMENTUM_SWITCH else MOMENTUM_LATE
        update = momentum * update - LEARNING_RATE * grad
        y = y + update
    return y


def _squared_distances(x: np.ndarray) -> np.ndarray:
    norms = (x * x).sum(axis=1)
    d2 = norms[:, None] + norms[None, :] - 2.0 * (x @ x.T)
    np.fill_diagonal(d2, 0.0)
    return np.maximum(d2, 0.0)


def _joint_probabilities(x: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized affinities whose per-point entropy matches log(perplexity)."""
    n = x.shape[0]
    d2 = _squared_distances(x)
    target = np.log(perplexity)
    cond = np.zeros((n, n))
    for i in range(n):
        cond[i] = _conditional_row(d2[i], i, target)
    p = (cond + cond.T) / (2.0 * n)
    return np.maximum(p, P_FLOOR)


def _conditional_row(d2_row: np.ndarray, i: int, target_entropy: float) -> np.ndarray:
    """Bisection on the precision beta so H(P_i) hits the target entropy."""
    beta, beta_min, beta_max = 1.0, -np.inf, np.inf
    n = d2_row.size
    row = np.zeros(n)
    for _ in range(BISECTION_STEPS):
        row = np.exp(-d2_row * beta)
        row[i] = 0.0
        total = row.sum()
        if total <= 0.0:
            total = P_FLOOR
        row /= total
        entropy = np.log(total) + beta * float((d2_row * row).sum())
        diff = entropy - target_entropy
        if abs(diff) <= BISECTION_TOL:
            break
        if diff > 0:
            beta_min = beta
            beta = beta * 2.0 if beta_max == np.inf else 0.5 * (beta + beta_max)
        else:
            beta_max = beta
            beta = beta / 2.0 if beta_min == -np.inf else 0.5 * (beta + beta_min)
    return row


def _gradient(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """KL gradient under the Student-t low-dimensional kernel."""
    n = y.shape[0]
    norms = (y * y).sum(axis=1)
    d2 = norms[:, None] + norms[None, :] - 2.0 * (y @ y.T)
    num = 1.0 / (1.0 + np.maximum(d2, 0.0))
    np.fill_diagonal(num, 0.0)
    q = np.maximum(num / num.sum(), P_FLOOR)
    w = (p - q) * num
    return 4.0 * (w.sum(axis=1)[:, None] * y - w @ y)
