"""Metrics, seeded train/test split and k-fold cross-validation."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .model import GbtConfig, predict, train


def _pair(y, y_hat):
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.ndim != 1:
        raise ValidationError(f"length mismatch: {y.shape} vs {y_hat.shape}")
    if y.size == 0:
        raise ValidationError("metrics need at least one value")
    return y, y_hat


def mse(y, y_hat) -> float:
    y, y_hat = _pair(y, y_hat)
    return float(np.mean((y - y_hat) ** 2))


def r2(y, y_hat) -> float:
    y, y_hat = _pair(y, y_hat)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise ValidationError("R2 is undefined for a constant target")
    return 1.0 - float(np.sum((y - y_hat) ** 2)) / ss_tot


@dataclass(frozen=True)
class Metrics:
    mse: float
    r2: float
    fold_r2: tuple[float, ...] = ()

    @property
    def mean_fold_r2(self) -> float:
        return float(np.mean(self.fold_r2)) if self.fold_r2 else float("nan")


def train_test_split(X, y, train_fraction: float = 0.8, seed: int = 0):
    """Seeded shuffle, then the first ``train_fraction`` of rows train.

    Returns ``(train_idx, test_idx)`` as index arrays.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError("train_fraction must be in (0, 1)")
    n = len(y)
    if len(X) != n:
        raise ValidationError("X rows and y length differ")
    n_train = int(round(train_fraction * n))
    if n_train < 1 or n_train >= n:
        raise ValidationError(f"{n} rows cannot populate both sides of a {train_fraction} split")
    perm = np.random.default_rng(seed).permutation(n)
    return perm[:n_train], perm[n_train:]


def kfold_indices(n: int, k: int = 5, seed: int = 0) -> list[np.ndarray]:
    if k < 2:
        raise ValidationError("k must be at least 2")
    if k > n:
        raise ValidationError(f"k={k} exceeds the {n} available rows")
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, k)


def thread_count() -> int:
    """Worker cap from FIRESEVERITY_THREADS (0 or unset = CPU count)."""
    try:
        n = int(os.environ.get("FIRESEVERITY_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def kfold_cv(X, y, config: GbtConfig = GbtConfig(), k: int = 5, seed: int = 0) -> list[float]:
    """Validation R2 of each fold after training on the other k-1 folds."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    folds = kfold_indices(len(y), k, seed)

    def run(i: int) -> float:
        val = folds[i]
        fit = np.concatenate([f for j, f in enumerate(folds) if j != i])
        model = train(X[fit], y[fit], config)
        y_val = y[val]
        pred = predict(model, X[val])
        if len(val) == 1 or np.all(y_val == y_val[0]):
            # R2 is undefined on a single-row or constant fold
            return float("nan")
        return r2(y_val, pred)

    workers = min(thread_count(), k)
    if workers <= 1:
        return [run(i) for i in range(k)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(k)))


def evaluate(model, X, y) -> Metrics:
    p = predict(model, X)
    return Metrics(mse(y, p), r2(y, p))


__all__ = [
    "Metrics",
    "evaluate",
    "kfold_cv",
    "kfold_indices",
    "mse",
    "r2",
    "thread_count",
    "train_test_split",
]
