"""Cleaning and scaling: dedup, confidence classes, partitions, scalers, imputation."""

from __future__ import annotations

import enum
import os
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import EmptyResultError, InputError, ValidationError
from .ingest import FireEvent

DEFAULT_MIN_CONFIDENCE = 30.0
NOMINAL_LOWER = 30.0
HIGH_ABOVE = 80.0


class ConfidenceClass(enum.Enum):
    LOW = "Low"
    NOMINAL = "Nominal"
    HIGH = "High"


def dedup_events(events: Iterable[FireEvent]) -> list[FireEvent]:
    """Drop exact repeats, keeping the first occurrence in input order."""
    seen = set()
    out = []
    for e in events:
        if e not in seen:
            seen.add(e)
            out.append(e)
    return out


def classify_confidence(c: float) -> ConfidenceClass:
    if not 0.0 <= c <= 100.0:
        raise ValueError(f"confidence {c} outside [0, 100]")
    if c < NOMINAL_LOWER:
        return ConfidenceClass.LOW
    if c <= HIGH_ABOVE:
        return ConfidenceClass.NOMINAL
    return ConfidenceClass.HIGH


def filter_confidence(
    events: Iterable[FireEvent], min_confidence: float = DEFAULT_MIN_CONFIDENCE
) -> list[FireEvent]:
    if not 0.0 <= min_confidence <= 100.0:
        raise ValueError(f"min_confidence {min_confidence} outside [0, 100]")
    return [e for e in events if e.confidence >= min_confidence]


def partition_by_period(events: Iterable[FireEvent], granularity: str = "month") -> dict[str, list[FireEvent]]:
    """Bucket events by ``YYYY-MM`` (month) or ``YYYY`` (calendar year), sorted."""
    g = granularity.lower()
    if g == "month":
        key = lambda e: f"{e.acq_date.year:04d}-{e.acq_date.month:02d}"  # noqa: E731
    elif g in ("year", "calendaryear", "calendar_year"):
        key = lambda e: f"{e.acq_date.year:04d}"  # noqa: E731
    else:
        raise ValueError(f"unknown granularity {granularity!r}")
    buckets: dict[str, list[FireEvent]] = defaultdict(list)
    for e in events:
        buckets[key(e)].append(e)
    return {k: buckets[k] for k in sorted(buckets)}


# --------------------------------------------------------------------------
# Scalers

SCALER_FORMAT = "fireseverity-scaler"
SCALER_VERSION = 1


@dataclass(frozen=True)
class ScalerParams:
    kind: str  # "minmax" or "zscore"
    a: np.ndarray  # min or mean, per column
    b: np.ndarray  # max or stddev, per column

    def __post_init__(self):
        if self.kind not in ("minmax", "zscore"):
            raise ValueError(f"unknown scaler kind {self.kind!r}")
        a = np.asarray(self.a, dtype=np.float64).copy()
        b = np.asarray(self.b, dtype=np.float64).copy()
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("scaler statistics must be two equal-length vectors")
        if self.kind == "minmax" and np.any(b < a):
            raise ValueError("minmax scaler requires max >= min per column")
        if self.kind == "zscore" and np.any(b < 0):
            raise ValueError("zscore scaler requires stddev >= 0")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def column_count(self) -> int:
        return self.a.shape[0]

    def _scale(self) -> np.ndarray:
        return (self.b - self.a) if self.kind == "minmax" else self.b


def fit_scaler(X: np.ndarray, kind: str = "zscore") -> ScalerParams:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("cannot fit a scaler on an empty matrix")
    kind = kind.lower()
    if kind == "minmax":
        return ScalerParams(kind, X.min(axis=0), X.max(axis=0))
    if kind == "zscore":
        return ScalerParams(kind, X.mean(axis=0), X.std(axis=0))
    raise ValueError(f"unknown scaler kind {kind!r}")


def _check_cols(X: np.ndarray, params: ScalerParams) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != params.column_count:
        raise ValidationError(
            f"column-count mismatch: matrix has {X.shape[-1]}, scaler has {params.column_count}"
        )
    return X


def apply_scaler(X: np.ndarray, params: ScalerParams) -> np.ndarray:
    """Scale columns; constant columns map to 0 rather than NaN."""
    X = _check_cols(X, params)
    s = params._scale()
    const = s == 0
    out = (X - params.a) / np.where(const, 1.0, s)
    out[:, const] = 0.0
    return out


def inverse_scaler(Z: np.ndarray, params: ScalerParams) -> np.ndarray:
    Z = _check_cols(Z, params)
    return Z * params._scale() + params.a


def dump_scaler(params: ScalerParams) -> str:
    lines = [
        f"format = {SCALER_FORMAT}",
        f"version = {SCALER_VERSION}",
        f"kind = {params.kind}",
        f"columns = {params.column_count}",
    ]
    for i, (a, b) in enumerate(zip(params.a, params.b)):
        lines.append(f"col.{i} = {float(a)!r} {float(b)!r}")
    return "\n".join(lines) + "\n"


def load_scaler(text: str) -> ScalerParams:
    kv = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"scaler line {n}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        kv[k] = (n, v)
    try:
        if kv["format"][1] != SCALER_FORMAT:
            raise InputError("not a scaler file")
        if int(kv["version"][1]) != SCALER_VERSION:
            raise InputError(f"unsupported scaler version {kv['version'][1]}")
        kind = kv["kind"][1]
        ncol = int(kv["columns"][1])
        a, b = [], []
        for i in range(ncol):
            n, v = kv[f"col.{i}"]
            try:
                x, y = v.split()
                a.append(float(x))
                b.append(float(y))
            except ValueError:
                raise InputError(f"scaler line {n}: malformed column statistics") from None
    except KeyError as exc:
        raise InputError(f"scaler file missing key {exc.args[0]}") from None
    try:
        return ScalerParams(kind, np.array(a), np.array(b))
    except ValueError as exc:
        raise InputError(f"scaler file: {exc}") from None


def save_scaler(params: ScalerParams, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_scaler(params))


def read_scaler(path: str | os.PathLike) -> ScalerParams:
    if not os.path.isfile(path):
        raise InputError(f"scaler file not found: {os.fspath(path)}")
    with open(path, encoding="utf-8") as fh:
        return load_scaler(fh.read())


# --------------------------------------------------------------------------
# Missing values


def impute_missing(matrix, strategy: str = "droprow"):
    """Remove nodata from a FeatureMatrix.

    ``droprow`` drops any row with a missing feature or target;
    ``columnmean`` fills features with the column mean of valid entries and
    drops rows whose target is missing.  Raises EmptyResultError when no
    rows survive.
    """
    s = strategy.lower().replace("_", "")
    X = matrix.features
    y = matrix.target
    bad_target = np.isnan(y)
    if s == "droprow":
        keep = ~(bad_target | np.isnan(X).any(axis=1))
        out = matrix.subset(keep)
    elif s == "columnmean":
        keep = ~bad_target
        out = matrix.subset(keep)
        Xf = out.features.copy()
        miss = np.isnan(Xf)
        if miss.any():
            counts = (~miss).sum(axis=0)
            sums = np.where(miss, 0.0, Xf).sum(axis=0)
            means = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
            Xf[miss] = np.take(means, np.nonzero(miss)[1])
            out = out.with_features(Xf)
    else:
        raise ValueError(f"unknown imputation strategy {strategy!r}")
    if out.n_rows == 0:
        raise EmptyResultError("imputation removed every row")
    return out


__all__ = [
    "ConfidenceClass",
    "ScalerParams",
    "apply_scaler",
    "classify_confidence",
    "dedup_events",
    "dump_scaler",
    "filter_confidence",
    "fit_scaler",
    "impute_missing",
    "inverse_scaler",
    "load_scaler",
    "partition_by_period",
    "read_scaler",
    "save_scaler",
]
