"""Squared-error gradient boosting over exact-greedy regression trees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from ..errors import ConfigError, ValidationError
from .tree import Tree, build_tree

PRNG_NAME = "numpy-pcg64"


@dataclass(frozen=True)
class GbtConfig:
    n_estimators: int = 500
    learning_rate: float = 0.1
    max_depth: int = 5
    subsample: float = 0.8
    colsample: float = 0.8
    min_samples_leaf: int = 1
    lambda_l2: float = 1.0
    seed: int = 0

    def __post_init__(self):
        problems = []
        if not (isinstance(self.n_estimators, int) and self.n_estimators >= 1):
            problems.append("n_estimators must be an integer >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            problems.append("learning_rate must be in (0, 1]")
        if not (isinstance(self.max_depth, int) and self.max_depth >= 1):
            problems.append("max_depth must be an integer >= 1")
        if not 0.0 < self.subsample <= 1.0:
            problems.append("subsample must be in (0, 1]")
        if not 0.0 < self.colsample <= 1.0:
            problems.append("colsample must be in (0, 1]")
        if not (isinstance(self.min_samples_leaf, int) and self.min_samples_leaf >= 1):
            problems.append("min_samples_leaf must be an integer >= 1")
        if not self.lambda_l2 >= 0.0:
            problems.append("lambda_l2 must be >= 0")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            problems.append("seed must be a non-negative integer")
        if problems:
            raise ConfigError("; ".join(problems))

    @classmethod
    def from_mapping(cls, values: dict) -> "GbtConfig":
        kinds = {f.name: f.type for f in fields(cls)}
        kw = {}
        for key, raw in values.items():
            if key not in kinds:
                raise ConfigError(f"unknown model setting {key!r}")
            try:
                kw[key] = int(raw) if kinds[key] in ("int", int) else float(raw)
            except (TypeError, ValueError):
                raise ConfigError(f"model setting {key}={raw!r} is not a number") from None
        return cls(**kw)


@dataclass(frozen=True)
class GbtModel:
    base_score: float
    trees: tuple[Tree, ...]
    learning_rate: float
    feature_count: int
    feature_names: tuple[str, ...] = ()
    config: GbtConfig = field(default_factory=GbtConfig)

    def __post_init__(self):
        if not self.feature_names:
            object.__setattr__(
                self, "feature_names", tuple(f"f{i}" for i in range(self.feature_count))
            )
        if len(self.feature_names) != self.feature_count:
            raise ValidationError("feature_names length differs from feature_count")

    @property
    def used_features(self) -> list[tuple[int, ...]]:
        return [t.used_features for t in self.trees]

    @property
    def cumulative_gain(self) -> np.ndarray:
        return _split_totals(self, "gain")


def _check_matrix(X, what="X") -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValidationError(f"{what} must be two-dimensional")
    if not np.isfinite(X).all():
        raise ValidationError(f"{what} contains non-finite values")
    return X


def _sample_size(fraction: float, n: int) -> int:
    return min(n, max(1, int(round(fraction * n))))


def train(X, y, config: GbtConfig = GbtConfig(), feature_names=()) -> GbtModel:
    """Fit ``config.n_estimators`` trees to successive residuals.

    Each round draws rows (without replacement, ``subsample``) and then
    features (``colsample``) from one PCG64 stream seeded by ``config.seed``.
    """
    X = _check_matrix(X)
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ValidationError("X rows and y length differ")
    if X.shape[0] < 2:
        raise ValidationError("training needs at least two rows")
    if not np.isfinite(y).all():
        raise ValidationError("y contains non-finite values")
    n, p = X.shape
    rng = np.random.Generator(np.random.PCG64(config.seed))
    sorted_index = np.argsort(X, axis=0, kind="stable").T.copy()
    base = float(np.mean(y))
    m = _sample_size(config.subsample, n)
    k = _sample_size(config.colsample, p)
    all_rows = np.arange(n)
    all_feats = np.arange(p)
    tree_sum = np.zeros(n)
    trees = []
    for _ in range(config.n_estimators):
        residual = y - (base + config.learning_rate * tree_sum)
        rows = all_rows if m == n else np.sort(rng.choice(n, size=m, replace=False))
        feats = all_feats if k == p else np.sort(rng.choice(p, size=k, replace=False))
        tree = build_tree(
            X, residual, rows, feats, sorted_index,
            config.max_depth, config.min_samples_leaf, config.lambda_l2,
        )
        trees.append(tree)
        tree_sum += tree.predict(X)
    return GbtModel(base, tuple(trees), config.learning_rate, p, tuple(feature_names), config)


def predict(model: GbtModel, X, n_trees: int | None = None) -> np.ndarray:
    """base_score + learning_rate * (sum of the first ``n_trees`` tree outputs)."""
    X = _check_matrix(X)
    if X.shape[1] != model.feature_count:
        raise ValidationError(
            f"column mismatch: X has {X.shape[1]} columns, model expects {model.feature_count}"
        )
    tree_sum = np.zeros(X.shape[0])
    for tree in model.trees[:n_trees]:
        tree_sum += tree.predict(X)
    return model.base_score + model.learning_rate * tree_sum


def _split_totals(model: GbtModel, kind: str) -> np.ndarray:
    out = np.zeros(model.feature_count)
    for t in model.trees:
        f, g = t.splits()
        np.add.at(out, f, g if kind == "gain" else 1.0)
    return out


def feature_importance(model: GbtModel, kind: str = "gain") -> np.ndarray:
    """Split gain or split count per feature, normalised to sum 1.

    A feature that is never split on gets exactly 0; a model without any
    split gets the zero vector.
    """
    kind = kind.lower()
    if kind not in ("gain", "frequency"):
        raise ValueError(f"unknown importance kind {kind!r}")
    raw = _split_totals(model, kind)
    total = math.fsum(raw)
    if total == 0:
        return raw
    return raw / total
