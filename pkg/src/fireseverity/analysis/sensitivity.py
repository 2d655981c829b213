"""Vegetation-change scenarios run through a frozen model and scaler."""

from __future__ import annotations

import configparser
import csv
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import ConfigError, InputError, ValidationError
from ..gbt import GbtModel, predict
from ..preprocess import ScalerParams, apply_scaler

DEFAULT_FEATURES = ("NDVI", "EVI", "NBR")
SCENARIO_VERSION = 1
QUANTILES = (0.05, 0.5, 0.95)


@dataclass(frozen=True)
class Scenario:
    name: str
    perturbed_features: tuple[str, ...] = DEFAULT_FEATURES
    shift_fraction: float = 0.0
    horizon_label: str = ""

    def __post_init__(self):
        if not abs(self.shift_fraction) < 1.0:
            raise ConfigError(f"scenario {self.name!r}: |shift| must be < 1")
        object.__setattr__(self, "perturbed_features", tuple(self.perturbed_features))


BASELINE = Scenario("baseline", (), 0.0)


def default_scenarios() -> list[Scenario]:
    """Baseline, moderate (10%) and significant (30%) vegetation shifts."""
    return [
        Scenario("baseline", DEFAULT_FEATURES, 0.0),
        Scenario("moderate", DEFAULT_FEATURES, -0.10),
        Scenario("significant", DEFAULT_FEATURES, -0.30),
    ]


@dataclass(frozen=True)
class ScenarioSummary:
    scenario: Scenario
    predictions: np.ndarray = field(repr=False)
    deltas: np.ndarray = field(repr=False)

    def stats(self) -> dict[str, float]:
        out = {}
        for label, v in (("pred", self.predictions), ("delta", self.deltas)):
            out[f"{label}_mean"] = float(np.mean(v))
            out[f"{label}_std"] = float(np.std(v))
            for q, val in zip(QUANTILES, np.quantile(v, QUANTILES)):
                out[f"{label}_q{int(round(q * 100)):02d}"] = float(val)
        return out


@dataclass(frozen=True)
class SensitivityReport:
    summaries: list[ScenarioSummary]

    @property
    def spread(self) -> np.ndarray:
        """Per-row range (max - min) of predictions across scenarios."""
        P = np.stack([s.predictions for s in self.summaries])
        return P.max(axis=0) - P.min(axis=0)


def perturb(X_raw: np.ndarray, columns: Sequence[int], shift: float) -> np.ndarray:
    Xp = np.array(X_raw, dtype=np.float64, copy=True)
    if shift != 0.0:
        Xp[:, list(columns)] *= 1.0 + shift
    return Xp


def sensitivity_scan(
    model: GbtModel,
    X_raw,
    scaler: ScalerParams,
    scenarios: Sequence[Scenario],
    feature_names: Sequence[str] | None = None,
) -> SensitivityReport:
    """Multiply the named raw columns by (1 + shift), rescale and predict.

    A zero-shift scenario reproduces the unperturbed predictions bit for bit,
    so its deltas are exactly 0.  A baseline row is added when no scenario
    has zero shift.
    """
    names = list(feature_names if feature_names is not None else model.feature_names)
    X_raw = np.asarray(X_raw, dtype=np.float64)
    if X_raw.ndim != 2 or X_raw.shape[1] != len(names):
        raise ValidationError("X columns do not match the feature names")
    scenarios = list(scenarios)
    if not any(s.shift_fraction == 0.0 for s in scenarios):
        scenarios.insert(0, BASELINE)
    base_pred = predict(model, apply_scaler(X_raw, scaler))
    out = []
    for sc in scenarios:
        try:
            cols = [names.index(f) for f in sc.perturbed_features]
        except ValueError:
            unknown = [f for f in sc.perturbed_features if f not in names]
            raise ValidationError(f"scenario {sc.name!r}: unknown feature(s) {unknown}") from None
        pred = predict(model, apply_scaler(perturb(X_raw, cols, sc.shift_fraction), scaler))
        out.append(ScenarioSummary(sc, pred, pred - base_pred))
    return SensitivityReport(out)


def write_sensitivity(report: SensitivityReport, path, spread_path=None) -> None:
    header = None
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for s in report.summaries:
            stats = s.stats()
            if header is None:
                header = ["scenario", "features", "shift_fraction", "horizon", "n"] + list(stats)
                w.writerow(header)
            sc = s.scenario
            w.writerow(
                [sc.name, ";".join(sc.perturbed_features), repr(sc.shift_fraction),
                 sc.horizon_label, s.predictions.size]
                + [repr(v) for v in stats.values()]
            )
    if spread_path is not None:
        spread = report.spread
        with open(spread_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["metric", "value"])
            w.writerow(["scenario_count", len(report.summaries)])
            if spread.size:
                w.writerow(["spread_mean", repr(float(spread.mean()))])
                w.writerow(["spread_max", repr(float(spread.max()))])
            scen_means = [float(np.mean(s.predictions)) for s in report.summaries]
            if scen_means:
                w.writerow(["scenario_mean_range", repr(max(scen_means) - min(scen_means))])


# --------------------------------------------------------------------------
# Scenario files
#
#   [meta]
#   version = 1
#
#   [scenario moderate]
#   features = NDVI, EVI, NBR
#   shift = -0.10
#   horizon = 10y


def parse_scenarios(text: str, source: str = "<scenarios>") -> list[Scenario]:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if cp.sections() and cp.get("meta", "version", fallback=None) != str(SCENARIO_VERSION):
        raise ConfigError(f"{source}: expected [meta] version = {SCENARIO_VERSION}")
    out = []
    for sec in cp.sections():
        if sec == "meta":
            continue
        kind, _, name = sec.partition(" ")
        if kind != "scenario" or not name.strip():
            raise ConfigError(f"{source}: unexpected section [{sec}]")
        s = cp[sec]
        feats = tuple(f.strip() for f in s.get("features", ",".join(DEFAULT_FEATURES)).split(",") if f.strip())
        try:
            shift = float(s.get("shift", "0"))
        except ValueError:
            raise ConfigError(f"{source}: [{sec}] shift is not a number") from None
        out.append(Scenario(name.strip(), feats, shift, s.get("horizon", "").strip()))
    return out


def read_scenarios(path: str | os.PathLike) -> list[Scenario]:
    if not os.path.isfile(path):
        raise InputError(f"scenario file not found: {os.fspath(path)}")
    with open(path, encoding="utf-8") as fh:
        return parse_scenarios(fh.read(), os.fspath(path))
