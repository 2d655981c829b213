"""Fire Severity Index: sum of burned area x intensity x duration per detection."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from .ingest import FireEvent
from .preprocess import partition_by_period


@dataclass(frozen=True)
class FsiParams:
    area_source: str = "scan_track"  # or "fixed"
    fixed_area_km2: float = 1.0
    intensity_source: str = "frp"  # or "brightness"
    duration_days: float = 1.0

    def __post_init__(self):
        if self.area_source not in ("scan_track", "fixed"):
            raise ValueError(f"unknown area source {self.area_source!r}")
        if self.intensity_source not in ("frp", "brightness"):
            raise ValueError(f"unknown intensity source {self.intensity_source!r}")
        if not self.fixed_area_km2 > 0:
            raise ValueError("fixed area must be positive")
        if not self.duration_days > 0:
            raise ValueError("duration must be positive")


def fsi_term(e: FireEvent, params: FsiParams = FsiParams()) -> float:
    area = e.scan * e.track if params.area_source == "scan_track" else params.fixed_area_km2
    intensity = e.frp if params.intensity_source == "frp" else e.brightness
    return area * intensity * params.duration_days


def fsi(events: Iterable[FireEvent], params: FsiParams = FsiParams()) -> float:
    # fsum is correctly rounded, hence independent of event order
    return math.fsum(fsi_term(e, params) for e in events)


@dataclass(frozen=True)
class FsiRow:
    period: str
    event_count: int
    fsi_sum: float
    fsi_mean: float


def _series(events, granularity: str, params: FsiParams) -> list[FsiRow]:
    rows = []
    for period, bucket in partition_by_period(events, granularity).items():
        total = fsi(bucket, params)
        rows.append(FsiRow(period, len(bucket), total, total / len(bucket)))
    return rows


def monthly_counts(events: Iterable[FireEvent], params: FsiParams = FsiParams()) -> list[FsiRow]:
    return _series(events, "month", params)


def annual_mean_fsi(events: Iterable[FireEvent], params: FsiParams = FsiParams()) -> list[FsiRow]:
    return _series(events, "year", params)


def minmax_scaled(values: Sequence[float]) -> list[float]:
    if not values:
        return []
    lo, hi = min(values), max(values)
    if hi == lo:
        return [0.0] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def write_series(rows: Sequence[FsiRow], path: str | os.PathLike, normalize: bool = False) -> None:
    header = ["period", "event_count", "fsi_sum", "fsi_mean"]
    scaled = minmax_scaled([r.fsi_mean for r in rows]) if normalize else None
    if normalize:
        header.append("fsi_mean_minmax")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, r in enumerate(rows):
            line = [r.period, r.event_count, repr(r.fsi_sum), repr(r.fsi_mean)]
            if scaled is not None:
                line.append(repr(scaled[i]))
            w.writerow(line)
