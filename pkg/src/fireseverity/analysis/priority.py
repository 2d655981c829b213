"""Resource-allocation priority from a declared, versioned scoring config."""

from __future__ import annotations

import configparser
import csv
import enum
import os
from dataclasses import dataclass, replace
from importlib import resources
from typing import Iterable, Sequence

from ..errors import ConfigError, InputError

PRIORITY_VERSION = 1


class Severity(enum.IntEnum):
    LOW = 0
    MODERATE = 1
    HIGH = 2
    VERY_HIGH = 3

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "Severity":
        key = text.strip().lower().replace(" ", "").replace("_", "")
        for member, label in _LABELS.items():
            if label.lower().replace(" ", "") == key:
                return member
        raise ValueError(f"unknown severity {text!r}")


_LABELS = {
    Severity.LOW: "Low",
    Severity.MODERATE: "Moderate",
    Severity.HIGH: "High",
    Severity.VERY_HIGH: "Very High",
}


class Priority(enum.IntEnum):
    MODERATE = 0
    HIGH = 1
    VERY_HIGH = 2

    @property
    def label(self) -> str:
        return ("Moderate", "High", "Very High")[self]

    @classmethod
    def parse(cls, text: str) -> "Priority":
        key = text.strip().lower().replace(" ", "").replace("_", "")
        for p in cls:
            if p.label.lower().replace(" ", "") == key:
                return p
        raise ValueError(f"unknown priority {text!r}")


@dataclass(frozen=True)
class PriorityRecord:
    region: str
    population_density: float
    vegetation_cover: float
    historical_severity: Severity
    predicted_severity: Severity
    priority: Priority | None = None

    def __post_init__(self):
        if not self.population_density >= 0:
            raise ValueError(f"{self.region}: population density must be >= 0")
        if not 0 <= self.vegetation_cover <= 100:
            raise ValueError(f"{self.region}: vegetation cover must be in [0, 100]")


@dataclass(frozen=True)
class PriorityConfig:
    w_population: float
    w_vegetation: float
    w_historical: float
    w_predicted: float
    population_edges: tuple[float, ...]
    vegetation_edges: tuple[float, ...]
    ordinal: tuple[float, float, float, float]  # score of Low, Moderate, High, Very High
    cut_high: float
    cut_very_high: float

    def __post_init__(self):
        ws = (self.w_population, self.w_vegetation, self.w_historical, self.w_predicted)
        if any(w < 0 for w in ws):
            raise ConfigError("priority weights must be non-negative")
        for edges in (self.population_edges, self.vegetation_edges):
            if list(edges) != sorted(edges):
                raise ConfigError("bucket edges must be ascending")
        if len(self.ordinal) != 4 or any(b < a for a, b in zip(self.ordinal, self.ordinal[1:])):
            raise ConfigError("ordinal scores must list 4 non-decreasing values")
        if not self.cut_high < self.cut_very_high:
            raise ConfigError("cut 'high' must be below cut 'very_high'")


def _bucket(x: float, edges: Sequence[float]) -> int:
    return sum(1 for e in edges if x >= e)


def priority_score(rec: PriorityRecord, cfg: PriorityConfig) -> float:
    return (
        cfg.w_population * _bucket(rec.population_density, cfg.population_edges)
        + cfg.w_vegetation * _bucket(rec.vegetation_cover, cfg.vegetation_edges)
        + cfg.w_historical * cfg.ordinal[rec.historical_severity]
        + cfg.w_predicted * cfg.ordinal[rec.predicted_severity]
    )


def classify_score(score: float, cfg: PriorityConfig) -> Priority:
    if score >= cfg.cut_very_high:
        return Priority.VERY_HIGH
    if score >= cfg.cut_high:
        return Priority.HIGH
    return Priority.MODERATE


def rank_priority(records: Iterable[PriorityRecord], cfg: PriorityConfig) -> list[PriorityRecord]:
    """Return copies of ``records`` with ``priority`` assigned."""
    return [replace(r, priority=classify_score(priority_score(r, cfg), cfg)) for r in records]


# --------------------------------------------------------------------------
# Files


def _floats(text: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"priority config: {what} must be numbers") from None


def parse_priority_config(text: str, source: str = "<priority>") -> PriorityConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
        if cp.get("meta", "version") != str(PRIORITY_VERSION):
            raise ConfigError(f"{source}: unsupported priority config version")
        w = cp["weights"]
        ordinal = cp["ordinal"]
        ords = tuple(
            _floats(ordinal[k], f"ordinal {k}")[0] for k in ("Low", "Moderate", "High", "VeryHigh")
        )
        return PriorityConfig(
            w_population=_floats(w["population"], "weights")[0],
            w_vegetation=_floats(w["vegetation"], "weights")[0],
            w_historical=_floats(w["historical"], "weights")[0],
            w_predicted=_floats(w["predicted"], "weights")[0],
            population_edges=_floats(cp.get("buckets", "population", fallback=""), "edges"),
            vegetation_edges=_floats(cp.get("buckets", "vegetation", fallback=""), "edges"),
            ordinal=ords,
            cut_high=_floats(cp["cuts"]["high"], "cuts")[0],
            cut_very_high=_floats(cp["cuts"]["very_high"], "cuts")[0],
        )
    except (configparser.Error, KeyError, IndexError) as exc:
        raise ConfigError(f"{source}: malformed priority config ({exc})") from None


def default_priority_config() -> PriorityConfig:
    text = resources.files("fireseverity").joinpath("data/priority.cfg").read_text("utf-8")
    return parse_priority_config(text, "priority.cfg")


def read_priority_config(path: str | os.PathLike) -> PriorityConfig:
    if not os.path.isfile(path):
        raise InputError(f"priority config not found: {os.fspath(path)}")
    with open(path, encoding="utf-8") as fh:
        return parse_priority_config(fh.read(), os.fspath(path))


def read_priority_records(path: str | os.PathLike) -> list[PriorityRecord]:
    """CSV with region, population_density, vegetation_cover,
    historical_severity, predicted_severity and an optional priority column."""
    p = os.fspath(path)
    if not os.path.isfile(p):
        raise InputError(f"priority input not found: {p}")
    with open(p, newline="", encoding="utf-8") as fh:
        return _records(csv.DictReader(fh), p)


def reference_records() -> list[PriorityRecord]:
    text = resources.files("fireseverity").joinpath("data/reference_regions.csv").read_text("utf-8")
    return _records(csv.DictReader(text.splitlines()), "reference_regions.csv")


def _records(reader, source: str) -> list[PriorityRecord]:
    need = {"region", "population_density", "vegetation_cover", "historical_severity", "predicted_severity"}
    missing = need - set(reader.fieldnames or [])
    if missing:
        raise InputError(f"{source}: missing column(s) {sorted(missing)}")
    out = []
    for n, row in enumerate(reader, start=2):
        try:
            prio = row.get("priority")
            out.append(
                PriorityRecord(
                    row["region"].strip(),
                    float(row["population_density"]),
                    float(row["vegetation_cover"]),
                    Severity.parse(row["historical_severity"]),
                    Severity.parse(row["predicted_severity"]),
                    Priority.parse(prio) if prio and prio.strip() else None,
                )
            )
        except (ValueError, AttributeError) as exc:
            raise InputError(f"{source} line {n}: {exc}") from None
    return out


def write_priorities(ranked: Sequence[PriorityRecord], cfg: PriorityConfig, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(
            ["region", "population_density", "vegetation_cover", "historical_severity",
             "predicted_severity", "score", "priority"]
        )
        for r in ranked:
            w.writerow(
                [r.region, f"{r.population_density:g}", f"{r.vegetation_cover:g}",
                 r.historical_severity.label, r.predicted_severity.label,
                 f"{priority_score(r, cfg):g}", r.priority.label]
            )


def compare_to_reference(expected: Sequence[PriorityRecord], ranked: Sequence[PriorityRecord]):
    """(matches, mismatches) where mismatches are (region, expected, got)."""
    mism = []
    for e, r in zip(expected, ranked):
        if e.priority is not None and e.priority != r.priority:
            mism.append((e.region, e.priority.label, r.priority.label))
    compared = sum(1 for e in expected if e.priority is not None)
    return compared - len(mism), mism


def write_mismatch_report(matches: int, total: int, mismatches, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"rows_compared = {total}\n")
        fh.write(f"rows_matched = {matches}\n")
        fh.write(f"rows_mismatched = {len(mismatches)}\n")
        for region, exp, got in mismatches:
            fh.write(f"mismatch = {region}: expected {exp}, got {got}\n")
