"""Pipeline configuration: one versioned INI file.

Grammar (``configparser`` syntax; paths are relative to the config file)::

    [meta]
    version = 1

    [inputs]
    firms = firms.csv
    dem = dem.tif
    mean_temperature = t2m.tif
    total_precipitation = tp.tif
    smi = smi.tif
    priority = regions.csv          ; optional, default: bundled regional table
    priority_config = priority.cfg  ; optional, default: bundled scoring config
    scenarios = scenarios.cfg       ; optional, default: baseline/moderate/significant
    matrix = matrix.bin             ; optional, train from this matrix instead of features/

    [landsat]
    2019.pre = a.tif, b.tif         ; pre-fire scenes, composited per pixel
    2019.post = c.tif               ; post-fire scenes of the following summer

    [grid]
    reference = a.tif               ; optional, default: first pre-fire scene
    pixel_size = 500
    meters_per_unit = 1

    [features]
    composite = median              ; or mean
    tpi_radius = 500
    landsat_resampling = nearest
    aux_resampling = bilinear

    [preprocess]
    min_confidence = 30
    scaler = zscore                 ; or minmax
    imputation = droprow            ; or columnmean

    [model]
    n_estimators = 500
    learning_rate = 0.1
    max_depth = 5
    subsample = 0.8
    colsample = 0.8
    min_samples_leaf = 1
    lambda_l2 = 1.0
    seed = 0

    [evaluation]
    train_fraction = 0.8
    folds = 5

    [fsi]
    area_source = scan_track        ; or fixed
    fixed_area_km2 = 1
    intensity_source = frp          ; or brightness
    duration_days = 1
    normalize = true                ; add a min-max scaled fsi_mean column

    [analysis]
    residual_bins = 50

    [output]
    directory = out
    figures = false
"""

from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .fsi import FsiParams
from .gbt import GbtConfig
from .indices import FIRST_FIRE_YEAR, LAST_FIRE_YEAR

CONFIG_VERSION = 1

_SECTIONS = {
    "meta": {"version"},
    "inputs": {"firms", "dem", "mean_temperature", "total_precipitation", "smi",
               "priority", "priority_config", "scenarios", "matrix"},
    "landsat": None,
    "grid": {"reference", "pixel_size", "meters_per_unit"},
    "features": {"composite", "tpi_radius", "landsat_resampling", "aux_resampling"},
    "preprocess": {"min_confidence", "scaler", "imputation"},
    "model": {"n_estimators", "learning_rate", "max_depth", "subsample", "colsample",
              "min_samples_leaf", "lambda_l2", "seed"},
    "evaluation": {"train_fraction", "folds"},
    "fsi": {"area_source", "fixed_area_km2", "intensity_source", "duration_days", "normalize"},
    "analysis": {"residual_bins"},
    "output": {"directory", "figures"},
}
_YEAR_KEY = re.compile(r"^(\d{4})\.(pre|post)$")


@dataclass(frozen=True)
class YearInputs:
    year: int
    pre: tuple[str, ...]
    post: tuple[str, ...]


@dataclass(frozen=True)
class PipelineConfig:
    source: str
    firms: str | None = None
    dem: str | None = None
    mean_temperature: str | None = None
    total_precipitation: str | None = None
    smi: str | None = None
    priority: str | None = None
    priority_config: str | None = None
    scenarios: str | None = None
    matrix: str | None = None
    years: tuple[YearInputs, ...] = ()
    grid_reference: str | None = None
    pixel_size: float = 500.0
    meters_per_unit: float = 1.0
    composite: str = "median"
    tpi_radius: float = 500.0
    landsat_resampling: str = "nearest"
    aux_resampling: str = "bilinear"
    min_confidence: float = 30.0
    scaler: str = "zscore"
    imputation: str = "droprow"
    model: GbtConfig = field(default_factory=GbtConfig)
    train_fraction: float = 0.8
    folds: int = 5
    fsi: FsiParams = field(default_factory=FsiParams)
    fsi_normalize: bool = True
    residual_bins: int = 50
    output_dir: str = "out"
    figures: bool = False

    @property
    def seed(self) -> int:
        return self.model.seed

    @property
    def fire_years(self) -> tuple[int, ...]:
        return tuple(y.year for y in self.years)

    def with_seed(self, seed: int) -> "PipelineConfig":
        return replace(self, model=replace(self.model, seed=seed))

    def with_output(self, directory: str) -> "PipelineConfig":
        return replace(self, output_dir=os.path.abspath(directory))


def _model(values: dict) -> GbtConfig:
    return GbtConfig.from_mapping(values)


def _choice(sec, key, default, allowed):
    v = sec.get(key, default).strip().lower()
    if v not in allowed:
        raise ConfigError(f"[{sec.name}] {key} must be one of {sorted(allowed)}, got {v!r}")
    return v


def _number(sec, key, default, cast=float):
    raw = sec.get(key)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"[{sec.name}] {key}={raw!r} is not a valid number") from None


def _bool(sec, key, default):
    try:
        return sec.getboolean(key, fallback=default)
    except ValueError:
        raise ConfigError(f"[{sec.name}] {key} must be true or false") from None


def parse_config(text: str, source: str = "<config>") -> PipelineConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {' '.join(str(exc).split())}") from None
    if cp.get("meta", "version", fallback=None) != str(CONFIG_VERSION):
        raise ConfigError(f"{source}: expected [meta] version = {CONFIG_VERSION}")
    for name in cp.sections():
        if name not in _SECTIONS:
            raise ConfigError(f"{source}: unknown section [{name}]")
        allowed = _SECTIONS[name]
        if allowed is not None:
            extra = set(cp[name]) - allowed
            if extra:
                raise ConfigError(f"{source}: unknown key(s) in [{name}]: {sorted(extra)}")
    for name in _SECTIONS:
        if not cp.has_section(name):
            cp.add_section(name)

    base = os.path.dirname(os.path.abspath(source)) if os.path.exists(source) else os.getcwd()

    def path(value):
        if value is None or not value.strip():
            return None
        return os.path.normpath(os.path.join(base, value.strip()))

    years: dict[int, dict[str, tuple[str, ...]]] = {}
    for key, value in cp["landsat"].items():
        m = _YEAR_KEY.match(key)
        if not m:
            raise ConfigError(f"{source}: [landsat] keys look like 2019.pre / 2019.post, got {key!r}")
        year = int(m.group(1))
        if not FIRST_FIRE_YEAR <= year <= LAST_FIRE_YEAR:
            raise ConfigError(f"{source}: fire year {year} outside {FIRST_FIRE_YEAR}-{LAST_FIRE_YEAR}")
        files = tuple(path(p) for p in value.split(",") if p.strip())
        if not files:
            raise ConfigError(f"{source}: [landsat] {key} lists no files")
        years.setdefault(year, {})[m.group(2)] = files
    year_inputs = []
    for year in sorted(years):
        d = years[year]
        for side in ("pre", "post"):
            if side not in d:
                raise ConfigError(f"{source}: [landsat] {year}.{side} is missing")
        year_inputs.append(YearInputs(year, d["pre"], d["post"]))

    inp, grid, feat = cp["inputs"], cp["grid"], cp["features"]
    pre, ev, fs, an, out = cp["preprocess"], cp["evaluation"], cp["fsi"], cp["analysis"], cp["output"]
    try:
        model = _model(dict(cp["model"]))
        fsi = FsiParams(
            area_source=fs.get("area_source", "scan_track").strip().lower(),
            fixed_area_km2=_number(fs, "fixed_area_km2", 1.0),
            intensity_source=fs.get("intensity_source", "frp").strip().lower(),
            duration_days=_number(fs, "duration_days", 1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None

    cfg = PipelineConfig(
        source=os.path.abspath(source) if os.path.exists(source) else source,
        firms=path(inp.get("firms")),
        dem=path(inp.get("dem")),
        mean_temperature=path(inp.get("mean_temperature")),
        total_precipitation=path(inp.get("total_precipitation")),
        smi=path(inp.get("smi")),
        priority=path(inp.get("priority")),
        priority_config=path(inp.get("priority_config")),
        scenarios=path(inp.get("scenarios")),
        matrix=path(inp.get("matrix")),
        years=tuple(year_inputs),
        grid_reference=path(grid.get("reference")),
        pixel_size=_number(grid, "pixel_size", 500.0),
        meters_per_unit=_number(grid, "meters_per_unit", 1.0),
        composite=_choice(feat, "composite", "median", {"median", "mean"}),
        tpi_radius=_number(feat, "tpi_radius", 500.0),
        landsat_resampling=_choice(feat, "landsat_resampling", "nearest", {"nearest", "bilinear"}),
        aux_resampling=_choice(feat, "aux_resampling", "bilinear", {"nearest", "bilinear"}),
        min_confidence=_number(pre, "min_confidence", 30.0),
        scaler=_choice(pre, "scaler", "zscore", {"zscore", "minmax"}),
        imputation=_choice(pre, "imputation", "droprow", {"droprow", "columnmean"}),
        model=model,
        train_fraction=_number(ev, "train_fraction", 0.8),
        folds=_number(ev, "folds", 5, int),
        fsi=fsi,
        fsi_normalize=_bool(fs, "normalize", True),
        residual_bins=_number(an, "residual_bins", 50, int),
        output_dir=path(out.get("directory", "out")),
        figures=_bool(out, "figures", False),
    )
    _validate(cfg, source)
    return cfg


def _validate(cfg: PipelineConfig, source: str) -> None:
    problems = []
    if not cfg.pixel_size > 0:
        problems.append("[grid] pixel_size must be positive")
    if not cfg.meters_per_unit > 0:
        problems.append("[grid] meters_per_unit must be positive")
    if not cfg.tpi_radius > 0:
        problems.append("[features] tpi_radius must be positive")
    if not 0 <= cfg.min_confidence <= 100:
        problems.append("[preprocess] min_confidence must be in [0, 100]")
    if not 0 < cfg.train_fraction < 1:
        problems.append("[evaluation] train_fraction must be in (0, 1)")
    if cfg.folds < 2:
        problems.append("[evaluation] folds must be at least 2")
    if cfg.residual_bins < 1:
        problems.append("[analysis] residual_bins must be at least 1")
    if problems:
        raise ConfigError(f"{source}: " + "; ".join(problems))


def read_config(path: str | os.PathLike) -> PipelineConfig:
    p = os.fspath(path)
    if not os.path.isfile(p):
        raise ConfigError(f"config file not found: {p}")
    with open(p, encoding="utf-8") as fh:
        return parse_config(fh.read(), p)


__all__ = ["CONFIG_VERSION", "PipelineConfig", "YearInputs", "parse_config", "read_config"]
