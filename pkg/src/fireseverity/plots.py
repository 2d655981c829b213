"""PNG figures rendered next to the CSV outputs (headless Agg backend)."""

from __future__ import annotations

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# no timestamp or version strings, so reruns are byte-identical
_META = {"Software": None}


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(os.fspath(path), dpi=100, metadata=_META)
    plt.close(fig)


def plot_series(periods: Sequence[str], values: Sequence[float], ylabel: str, path, kind="bar") -> None:
    fig, ax = plt.subplots(figsize=(8, 3.5))
    x = np.arange(len(periods))
    if kind == "bar":
        ax.bar(x, values, color="tab:red")
    else:
        ax.plot(x, values, marker="o", color="tab:red")
    step = max(1, len(periods) // 12)
    ax.set_xticks(x[::step])
    ax.set_xticklabels(list(periods)[::step], rotation=45, ha="right")
    ax.set_ylabel(ylabel)
    _save(fig, path)


def plot_importance(names: Sequence[str], gain: Sequence[float], path) -> None:
    order = np.argsort(gain, kind="stable")
    fig, ax = plt.subplots(figsize=(6, 8))
    ax.barh([names[i] for i in order], np.asarray(gain)[order], color="tab:blue")
    ax.set_xlabel("gain importance")
    _save(fig, path)


def plot_actual_vs_predicted(y, y_hat, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(y, y_hat, s=6, alpha=0.6)
    lo = float(min(np.min(y), np.min(y_hat)))
    hi = float(max(np.max(y), np.max(y_hat)))
    ax.plot([lo, hi], [lo, hi], color="black", linewidth=1)
    ax.set_xlabel("actual dNBR")
    ax.set_ylabel("predicted dNBR")
    _save(fig, path)


def plot_residuals(edges, counts, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.stairs(counts, edges, fill=True, color="tab:purple")
    ax.set_xlabel("residual (actual - predicted)")
    ax.set_ylabel("count")
    _save(fig, path)


def plot_correlation(matrix, names: Sequence[str], path) -> None:
    fig, ax = plt.subplots(figsize=(10, 9))
    im = ax.imshow(matrix, vmin=-1, vmax=1, cmap="coolwarm")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=90, fontsize=7)
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=7)
    fig.colorbar(im, ax=ax, shrink=0.8)
    _save(fig, path)
