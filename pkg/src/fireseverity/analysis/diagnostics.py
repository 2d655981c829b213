"""Residual histogram, Pearson correlation and actual/predicted exports."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class ResidualSummary:
    residuals: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    mean: float
    std: float
    skew: float


def residual_summary(y, y_hat, bin_count: int = 50) -> ResidualSummary:
    """Residuals y - y_hat, equal-width histogram and population moments."""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.ndim != 1:
        raise ValidationError(f"length mismatch: {y.shape} vs {y_hat.shape}")
    if y.size == 0:
        raise ValidationError("residual summary needs at least one value")
    if bin_count < 1:
        raise ValidationError("bin_count must be >= 1")
    r = y - y_hat
    counts, edges = np.histogram(r, bins=bin_count)
    mean = float(r.mean())
    d = r - mean
    std = float(np.sqrt(np.mean(d * d)))
    skew = float(np.mean(d ** 3) / std ** 3) if std > 0 else 0.0
    return ResidualSummary(r, edges, counts, mean, std, skew)


@dataclass(frozen=True)
class Correlation:
    matrix: np.ndarray
    names: tuple[str, ...]
    constant_columns: tuple[str, ...]


def correlation_matrix(X, names: Sequence[str] | None = None) -> Correlation:
    """Pearson r for every column pair.

    Constant columns get 1 on the diagonal and 0 elsewhere, and are listed in
    ``constant_columns``.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValidationError("correlation needs at least two rows")
    if np.isnan(X).any():
        raise ValidationError("remove nodata before computing correlations")
    p = X.shape[1]
    names = tuple(names) if names is not None else tuple(f"f{i}" for i in range(p))
    D = X - X.mean(axis=0)
    norms = np.sqrt(np.sum(D * D, axis=0))
    const = norms == 0
    safe = np.where(const, 1.0, norms)
    Z = D / safe
    C = Z.T @ Z
    C = np.clip(C, -1.0, 1.0)
    iu = np.triu_indices(p, 1)
    C.T[iu] = C[iu]
    C[const, :] = 0.0
    C[:, const] = 0.0
    np.fill_diagonal(C, 1.0)
    return Correlation(C, names, tuple(n for n, c in zip(names, const) if c))


def write_correlation(corr: Correlation, path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + list(corr.names))
        for name, row in zip(corr.names, corr.matrix):
            w.writerow([name] + [repr(float(v)) for v in row])


def write_residuals(summary: ResidualSummary, hist_path, moments_path) -> None:
    with open(hist_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lower", "bin_upper", "count"])
        for lo, hi, c in zip(summary.bin_edges[:-1], summary.bin_edges[1:], summary.counts):
            w.writerow([repr(float(lo)), repr(float(hi)), int(c)])
    with open(moments_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "value"])
        w.writerow(["n", summary.residuals.size])
        w.writerow(["mean", repr(summary.mean)])
        w.writerow(["std", repr(summary.std)])
        w.writerow(["skew", repr(summary.skew)])


def actual_vs_predicted_export(y, y_hat, path: str | os.PathLike) -> None:
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape:
        raise ValidationError(f"length mismatch: {y.shape} vs {y_hat.shape}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["actual", "predicted"])
        for a, b in zip(y, y_hat):
            w.writerow([repr(float(a)), repr(float(b))])


def read_actual_vs_predicted(path: str | os.PathLike) -> tuple[np.ndarray, np.ndarray]:
    from ..errors import InputError

    if not os.path.isfile(path):
        raise InputError(f"predictions file not found: {os.fspath(path)}")
    a, b = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["actual", "predicted"]:
            raise InputError(f"{os.fspath(path)}: expected header actual,predicted")
        for n, row in enumerate(reader, start=2):
            try:
                a.append(float(row[0]))
                b.append(float(row[1]))
            except (IndexError, ValueError):
                raise InputError(f"{os.fspath(path)} line {n}: malformed pair") from None
    return np.array(a), np.array(b)
