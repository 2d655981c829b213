"""Pipeline stages behind the CLI subcommands.

Each ``cmd_*`` reads its inputs from the config (or from files an earlier
stage left under the output directory) and writes fixed file names::

    staged/events.csv  staged/rejections.csv
    staged/stack_<year>.tif  staged/post_<year>.tif
    features/stack_<year>.tif  features/matrix.bin
    fsi_monthly.csv  fsi_annual.csv
    model.gbt  scaler.txt  metrics.csv  actual_vs_predicted.csv
    importance.csv  correlation.csv  correlation_constant.csv
    residual_histogram.csv  residual_moments.csv
    sensitivity.csv  sensitivity_spread.csv
    priority.csv  priority_report.txt
    figures/*.png   (when [output] figures = true)
"""

from __future__ import annotations

import csv
import logging
import os
from dataclasses import dataclass

import numpy as np

from . import plots
from .analysis import (
    actual_vs_predicted_export,
    compare_to_reference,
    correlation_matrix,
    default_priority_config,
    default_scenarios,
    rank_priority,
    read_actual_vs_predicted,
    read_priority_config,
    read_priority_records,
    read_scenarios,
    residual_summary,
    sensitivity_scan,
    reference_records,
    write_correlation,
    write_mismatch_report,
    write_priorities,
    write_residuals,
    write_sensitivity,
)
from .config import PipelineConfig
from .errors import ConfigError, InputError
from .fsi import annual_mean_fsi, monthly_counts, write_series
from .gbt import feature_importance, kfold_cv, load, predict, r2, mse, save, train, train_test_split
from .indices import IndexId, composite_stacks, compute_all_indices, compute_index, dnbr
from .ingest import (
    BandStack,
    GridGeometry,
    RasterGrid,
    read_band_stack,
    read_firms_csv,
    read_raster,
    resample_to_grid,
    write_band_stack,
    write_firms_csv,
    write_rejections,
)
from .matrix import FeatureMatrix, flatten_stack, read_matrix, write_matrix
from .preprocess import (
    apply_scaler,
    dedup_events,
    filter_confidence,
    fit_scaler,
    impute_missing,
    read_scaler,
    save_scaler,
)
from .schema import LANDSAT_INDICES, SCHEMA
from .terrain import slope, tpi

log = logging.getLogger("fireseverity")

_AUX = (
    ("dem", "Elevation"),
    ("mean_temperature", "Mean_Temperature"),
    ("total_precipitation", "Total_Precipitation"),
    ("smi", "SMI"),
)


@dataclass(frozen=True)
class Layout:
    root: str

    def path(self, *parts: str) -> str:
        return os.path.join(self.root, *parts)

    def ensure(self, *parts: str) -> str:
        p = self.path(*parts)
        os.makedirs(os.path.dirname(p), exist_ok=True)
        return p

    def staged(self, year: int) -> str:
        return self.path("staged", f"stack_{year}.tif")

    def post(self, year: int) -> str:
        return self.path("staged", f"post_{year}.tif")

    def features(self, year: int) -> str:
        return self.path("features", f"stack_{year}.tif")


def _layout(cfg: PipelineConfig) -> Layout:
    os.makedirs(cfg.output_dir, exist_ok=True)
    return Layout(cfg.output_dir)


def _require(cfg: PipelineConfig, key: str) -> str:
    value = getattr(cfg, key)
    if value is None:
        raise ConfigError(f"[inputs] {key} is required for this subcommand")
    if not os.path.isfile(value):
        raise InputError(f"{key} input not found: {value}")
    return value


def _produced(path: str, stage: str) -> str:
    if not os.path.isfile(path):
        raise InputError(f"{path} not found; run `fireseverity {stage}` first")
    return path


# --------------------------------------------------------------------------
# ingest


def target_grid(cfg: PipelineConfig) -> GridGeometry:
    """Reference raster extent resampled to ``pixel_size`` metres."""
    if cfg.grid_reference is not None:
        ref_path = cfg.grid_reference
    elif cfg.years:
        ref_path = cfg.years[0].pre[0]
    else:
        raise ConfigError("no [grid] reference and no [landsat] scenes to take the grid from")
    if not os.path.isfile(ref_path):
        raise InputError(f"grid reference not found: {ref_path}")
    ref = read_raster(ref_path).geometry
    step = cfg.pixel_size / cfg.meters_per_unit
    if abs(ref.pixel_size_x) == step and abs(ref.pixel_size_y) == step:
        return ref
    width = max(1, int(round(ref.width * abs(ref.pixel_size_x) / step)))
    height = max(1, int(round(ref.height * abs(ref.pixel_size_y) / step)))
    return GridGeometry(
        width, height, ref.origin_x, ref.origin_y,
        float(np.copysign(step, ref.pixel_size_x)), float(np.copysign(step, ref.pixel_size_y)),
        ref.crs_id,
    )


def _to_grid(stack: BandStack, geom: GridGeometry, method: str) -> BandStack:
    if stack.geometry == geom:
        return stack
    bands = {i: resample_to_grid(g, geom, method) for i, g in stack.bands.items()}
    return BandStack(geom, bands, stack.schema)


def _read_scenes(paths, geom, cfg) -> BandStack:
    stacks = []
    for p in paths:
        s = read_band_stack(p)
        extra = [SCHEMA[i].name for i in s.bands if i not in LANDSAT_INDICES]
        if extra:
            raise InputError(f"{p}: non-Landsat band(s) in a scene file: {', '.join(extra)}")
        try:
            stacks.append(_to_grid(s, geom, cfg.landsat_resampling))
        except InputError:
            raise
        except ValueError as exc:
            raise InputError(f"{p}: {exc}") from None
    return composite_stacks(stacks, cfg.composite)


def _stage(stack: BandStack) -> BandStack:
    """Landsat bands absent from every scene get their fill value; bands that
    later stages compute are written as nodata placeholders."""
    filled = {}
    for e in stack.schema:
        if e.index in stack.bands:
            continue
        value = e.fill_if_missing if e.index in LANDSAT_INDICES else np.nan
        filled[e.index] = RasterGrid.constant(stack.geometry, value)
    return stack.with_bands(filled)


def cmd_ingest(cfg: PipelineConfig) -> list[str]:
    lay = _layout(cfg)
    paths = {key: _require(cfg, key) for key in ("firms",) + tuple(k for k, _ in _AUX)}
    if not cfg.years:
        raise ConfigError("[landsat] lists no fire years")
    for y in cfg.years:
        for p in y.pre + y.post:
            if not os.path.isfile(p):
                raise InputError(f"Landsat scene not found: {p}")

    read = read_firms_csv(paths["firms"])
    events = dedup_events(read.events)
    write_firms_csv(events, lay.ensure("staged", "events.csv"))
    write_rejections(read.rejections, lay.ensure("staged", "rejections.csv"))
    if read.rejections:
        log.warning("%d FIRMS row(s) rejected; see staged/rejections.csv", len(read.rejections))

    geom = target_grid(cfg)
    aux = {}
    for key, band in _AUX:
        try:
            aux[band] = resample_to_grid(read_raster(paths[key]), geom, cfg.aux_resampling)
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"{paths[key]}: {exc}") from None

    written = [lay.path("staged", "events.csv"), lay.path("staged", "rejections.csv")]
    for y in cfg.years:
        pre = _read_scenes(y.pre, geom, cfg).with_bands(aux)
        post = _read_scenes(y.post, geom, cfg)
        write_band_stack(_stage(pre), lay.ensure("staged", f"stack_{y.year}.tif"))
        write_band_stack(_stage(post), lay.post(y.year))
        written += [lay.staged(y.year), lay.post(y.year)]
    return written


# --------------------------------------------------------------------------
# features


def feature_stack(pre: BandStack, post: BandStack, cfg: PipelineConfig) -> BandStack:
    """Bands 23-29 and 31-32 from the pre-fire stack plus the dNBR target."""
    out = compute_all_indices(pre)
    dem = out.band("Elevation")
    return out.with_bands(
        {
            "Slope": slope(dem, cfg.meters_per_unit),
            "TPI": tpi(dem, cfg.tpi_radius, cfg.meters_per_unit),
            "dNBR": dnbr(out.band("NBR"), compute_index(post, IndexId.NBR)),
        }
    )


def cmd_features(cfg: PipelineConfig) -> list[str]:
    lay = _layout(cfg)
    if not cfg.years:
        raise ConfigError("[landsat] lists no fire years")
    parts = []
    written = []
    for y in cfg.years:
        pre = read_band_stack(_produced(lay.staged(y.year), "ingest"))
        post = read_band_stack(_produced(lay.post(y.year), "ingest"))
        stack = feature_stack(pre, post, cfg)
        write_band_stack(stack, lay.ensure("features", f"stack_{y.year}.tif"))
        written.append(lay.features(y.year))
        m = flatten_stack(stack, y.year)
        if m.n_rows == 0:
            log.warning("fire year %d: dNBR is nodata everywhere; no rows added", y.year)
        parts.append(m)
    matrix = FeatureMatrix.concat(parts)
    if matrix.n_rows == 0:
        log.warning("feature matrix is empty")
    write_matrix(matrix, lay.ensure("features", "matrix.bin"))
    written.append(lay.path("features", "matrix.bin"))
    return written


# --------------------------------------------------------------------------
# fsi


def cmd_fsi(cfg: PipelineConfig) -> list[str]:
    lay = _layout(cfg)
    store = _produced(lay.path("staged", "events.csv"), "ingest")
    events = filter_confidence(read_firms_csv(store).events, cfg.min_confidence)
    monthly = monthly_counts(events, cfg.fsi)
    annual = annual_mean_fsi(events, cfg.fsi)
    write_series(monthly, lay.path("fsi_monthly.csv"))
    write_series(annual, lay.path("fsi_annual.csv"), normalize=cfg.fsi_normalize)
    out = [lay.path("fsi_monthly.csv"), lay.path("fsi_annual.csv")]
    if cfg.figures:
        plots.plot_series([r.period for r in monthly], [r.event_count for r in monthly],
                          "fire events", lay.ensure("figures", "fsi_monthly_counts.png"))
        plots.plot_series([r.period for r in annual], [r.fsi_mean for r in annual],
                          "mean FSI", lay.ensure("figures", "fsi_annual_mean.png"), kind="line")
        out += [lay.path("figures", "fsi_monthly_counts.png"), lay.path("figures", "fsi_annual_mean.png")]
    return out


# --------------------------------------------------------------------------
# train


def _matrix_path(cfg: PipelineConfig, lay: Layout) -> str:
    if cfg.matrix is not None:
        if not os.path.isfile(cfg.matrix):
            raise InputError(f"matrix input not found: {cfg.matrix}")
        return cfg.matrix
    return _produced(lay.path("features", "matrix.bin"), "features")


def _training_matrix(cfg: PipelineConfig, lay: Layout) -> FeatureMatrix:
    return impute_missing(read_matrix(_matrix_path(cfg, lay)), cfg.imputation)


def cmd_train(cfg: PipelineConfig) -> list[str]:
    lay = _layout(cfg)
    m = _training_matrix(cfg, lay)
    X, y = m.features, m.target
    seed = cfg.seed
    tr, te = train_test_split(X, y, cfg.train_fraction, seed)
    # scaler statistics come from the training rows only
    scaler = fit_scaler(X[tr], cfg.scaler)
    Z_tr, Z_te = apply_scaler(X[tr], scaler), apply_scaler(X[te], scaler)
    folds = kfold_cv(Z_tr, y[tr], cfg.model, cfg.folds, seed)
    model = train(Z_tr, y[tr], cfg.model, m.feature_names)
    pred = predict(model, Z_te)
    test_mse, test_r2 = mse(y[te], pred), r2(y[te], pred)

    save(model, lay.path("model.gbt"))
    save_scaler(scaler, lay.path("scaler.txt"))
    with open(lay.path("metrics.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "value"])
        w.writerow(["seed", seed])
        w.writerow(["n_train", len(tr)])
        w.writerow(["n_test", len(te)])
        for i, v in enumerate(folds, start=1):
            w.writerow([f"fold_{i}_r2", repr(float(v))])
        w.writerow(["mean_fold_r2", repr(float(np.mean(folds)))])
        w.writerow(["test_mse", repr(test_mse)])
        w.writerow(["test_r2", repr(test_r2)])
    actual_vs_predicted_export(y[te], pred, lay.path("actual_vs_predicted.csv"))
    out = [lay.path(n) for n in ("model.gbt", "scaler.txt", "metrics.csv", "actual_vs_predicted.csv")]
    if cfg.figures:
        plots.plot_actual_vs_predicted(y[te], pred, lay.ensure("figures", "actual_vs_predicted.png"))
        out.append(lay.path("figures", "actual_vs_predicted.png"))
    return out


def read_metrics(path: str) -> dict[str, float]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return {k: float(v) for k, v in rows[1:]}


# --------------------------------------------------------------------------
# analyses


def cmd_importance(cfg: PipelineConfig) -> list[str]:
    lay = _layout(cfg)
    model = load(_produced(lay.path("model.gbt"), "train"))
    gain = feature_importance(model, "gain")
    freq = feature_importance(model, "frequency")
    with open(lay.path("importance.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature_name", "gain_importance", "frequency_importance"])
        for name, g, f in zip(model.feature_names, gain, freq):
            w.writerow([name, repr(float(g)), repr(float(f))])
    out = [lay.path("importance.csv")]
    if cfg.figures:
        plots.plot_importance(model.feature_names, gain, lay.ensure("figures", "importance.png"))
        out.append(lay.path("figures", "importance.png"))
    return out


def cmd_correlate(cfg: PipelineConfig) -> list[str]:
    lay = _layout(cfg)
    m = _training_matrix(cfg, lay)
    names = m.feature_names + (m.target_name,)
    corr = correlation_matrix(np.column_stack([m.features, m.target]), names)
    write_correlation(corr, lay.path("correlation.csv"))
    with open(lay.path("correlation_constant.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["column"])
        for name in corr.constant_columns:
            w.writerow([name])
    out = [lay.path("correlation.csv"), lay.path("correlation_constant.csv")]
    if cfg.figures:
        plots.plot_correlation(corr.matrix, names, lay.ensure("figures", "correlation.png"))
        out.append(lay.path("figures", "correlation.png"))
    return out


def cmd_residuals(cfg: PipelineConfig) -> list[str]:
    lay = _layout(cfg)
    y, y_hat = read_actual_vs_predicted(_produced(lay.path("actual_vs_predicted.csv"), "train"))
    summary = residual_summary(y, y_hat, cfg.residual_bins)
    write_residuals(summary, lay.path("residual_histogram.csv"), lay.path("residual_moments.csv"))
    out = [lay.path("residual_histogram.csv"), lay.path("residual_moments.csv")]
    if cfg.figures:
        plots.plot_residuals(summary.bin_edges, summary.counts, lay.ensure("figures", "residuals.png"))
        out.append(lay.path("figures", "residuals.png"))
    return out


def cmd_sensitivity(cfg: PipelineConfig) -> list[str]:
    lay = _layout(cfg)
    model = load(_produced(lay.path("model.gbt"), "train"))
    scaler = read_scaler(_produced(lay.path("scaler.txt"), "train"))
    m = _training_matrix(cfg, lay)
    scenarios = read_scenarios(cfg.scenarios) if cfg.scenarios is not None else default_scenarios()
    report = sensitivity_scan(model, m.features, scaler, scenarios, m.feature_names)
    write_sensitivity(report, lay.path("sensitivity.csv"), lay.path("sensitivity_spread.csv"))
    return [lay.path("sensitivity.csv"), lay.path("sensitivity_spread.csv")]


def cmd_priority(cfg: PipelineConfig) -> list[str]:
    lay = _layout(cfg)
    records = read_priority_records(cfg.priority) if cfg.priority is not None else reference_records()
    pcfg = (
        read_priority_config(cfg.priority_config)
        if cfg.priority_config is not None
        else default_priority_config()
    )
    ranked = rank_priority(records, pcfg)
    write_priorities(ranked, pcfg, lay.path("priority.csv"))
    out = [lay.path("priority.csv")]
    compared = sum(1 for r in records if r.priority is not None)
    if compared:
        matches, mism = compare_to_reference(records, ranked)
        write_mismatch_report(matches, compared, mism, lay.path("priority_report.txt"))
        out.append(lay.path("priority_report.txt"))
    return out


STAGES = {
    "ingest": cmd_ingest,
    "features": cmd_features,
    "fsi": cmd_fsi,
    "train": cmd_train,
    "importance": cmd_importance,
    "correlate": cmd_correlate,
    "residuals": cmd_residuals,
    "sensitivity": cmd_sensitivity,
    "priority": cmd_priority,
}


def run_all(cfg: PipelineConfig) -> list[str]:
    out = []
    for stage in STAGES.values():
        out += stage(cfg)
    return out


__all__ = [
    "Layout",
    "STAGES",
    "cmd_correlate",
    "cmd_features",
    "cmd_fsi",
    "cmd_importance",
    "cmd_ingest",
    "cmd_priority",
    "cmd_residuals",
    "cmd_sensitivity",
    "cmd_train",
    "feature_stack",
    "read_metrics",
    "run_all",
    "target_grid",
]
