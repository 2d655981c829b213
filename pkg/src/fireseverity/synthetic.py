"""Synthetic data with the real band layout: the regression benchmark and a
small two-year pipeline fixture."""

from __future__ import annotations

import os
from datetime import date, timedelta

import numpy as np

from .indices import IndexId, index_array
from .ingest import FireEvent, GridGeometry, RasterGrid, write_firms_csv, write_raster
from .matrix import FeatureMatrix
from .schema import FEATURE_NAMES, SCHEMA

# Typical surface-reflectance / thermal digital numbers (Landsat C2 L2 scale)
_LANDSAT_RANGES = {
    "SR_B1": (6000, 11000),
    "SR_B2": (6500, 11500),
    "SR_B3": (7500, 13000),
    "SR_B4": (8000, 15000),
    "SR_B5": (9000, 22000),
    "SR_B6": (9000, 20000),
    "SR_B7": (8000, 19000),
    "SR_QA_AEROSOL": (0, 228),
    "SR_ATMOS_OPACITY": (0, 0),
    "SR_CLOUD_QA": (0, 0),
    "ST_B6": (0, 0),
    "ST_B10": (38000, 46000),
    "ST_ATRAN": (5000, 9000),
    "ST_CDIST": (0, 5000),
    "ST_DRAD": (500, 1500),
    "ST_EMIS": (9500, 9900),
    "ST_EMSD": (0, 200),
    "ST_QA": (150, 600),
    "ST_TRAD": (8000, 11000),
    "ST_URAD": (1000, 3000),
    "QA_PIXEL": (21824, 21824),
    "QA_RADSAT": (0, 0),
}


def landsat_bands(rng: np.random.Generator, shape) -> dict[str, np.ndarray]:
    """Random Landsat digital numbers; zero-valued QA bands stay constant."""
    out = {}
    for name, (lo, hi) in _LANDSAT_RANGES.items():
        out[name] = rng.uniform(lo, hi, size=shape) if hi > lo else np.full(shape, float(lo))
    return out


def _zscore(v: np.ndarray) -> np.ndarray:
    return (v - v.mean()) / v.std()


def benchmark_features(n_rows: int, rng: np.random.Generator) -> np.ndarray:
    """(n_rows, 35) features in schema order 1..35."""
    bands = landsat_bands(rng, (n_rows,))
    cols = {name: bands[name] for name in _LANDSAT_RANGES}
    for idx in IndexId:
        cols[SCHEMA[idx.band_index].name] = index_array(idx, bands)
    elevation = rng.gamma(2.0, 110.0, size=n_rows) - 15.0
    cols["Elevation"] = elevation
    cols["Slope"] = rng.gamma(1.2, 0.6, size=n_rows)
    cols["TPI"] = rng.normal(0.0, 8.0, size=n_rows)
    cols["Mean_Temperature"] = rng.normal(295.8, 4.0, size=n_rows)
    cols["Total_Precipitation"] = rng.lognormal(np.log(60.0), 0.6, size=n_rows)
    cols["SMI"] = rng.beta(2.0, 12.0, size=n_rows)
    return np.column_stack([cols[name] for name in FEATURE_NAMES])


def benchmark_dataset(n_rows: int = 10_000, seed: int = 0, noise: float = 0.05) -> FeatureMatrix:
    """Regression benchmark standing in for the unpublished extracted dataset.

    y = 2 NBR - 1.5 BI + 0.5 z(Total_Precipitation) + 0.3 NDVI z(Mean_Temperature)
        + N(0, (noise * std(signal))^2)
    """
    rng = np.random.default_rng(seed)
    X = benchmark_features(n_rows, rng)
    col = {n: X[:, i] for i, n in enumerate(FEATURE_NAMES)}
    signal = (
        2.0 * col["NBR"]
        - 1.5 * col["BI"]
        + 0.5 * _zscore(col["Total_Precipitation"])
        + 0.3 * col["NDVI"] * _zscore(col["Mean_Temperature"])
    )
    y = signal + rng.normal(0.0, noise * signal.std(), size=n_rows)
    return FeatureMatrix(X, y, tuple(FEATURE_NAMES))


def linear_response_dataset(n_rows: int = 10_000, seed: int = 0, noise: float = 0.05) -> FeatureMatrix:
    """Benchmark restricted to its NBR term: y = 2 NBR + noise."""
    rng = np.random.default_rng(seed)
    X = benchmark_features(n_rows, rng)
    signal = 2.0 * X[:, FEATURE_NAMES.index("NBR")]
    y = signal + rng.normal(0.0, noise * signal.std(), size=n_rows)
    return FeatureMatrix(X, y, tuple(FEATURE_NAMES))


# --------------------------------------------------------------------------
# Two-year mini fixture for the end-to-end pipeline

MINI_YEARS = (2019, 2020)
MINI_SIZE = 24
MINI_PIXEL = 500.0
MINI_CRS = "EPSG:3577"


def mini_geometry(size: int = MINI_SIZE) -> GridGeometry:
    return GridGeometry(size, size, 1_200_000.0, -3_800_000.0, MINI_PIXEL, -MINI_PIXEL, MINI_CRS)


def _smooth(rng, shape, scale=4):
    coarse = rng.normal(size=(shape[0] // scale + 2, shape[1] // scale + 2))
    up = np.kron(coarse, np.ones((scale, scale)))[: shape[0], : shape[1]]
    k = np.ones(3) / 3
    up = np.apply_along_axis(lambda r: np.convolve(r, k, mode="same"), 1, up)
    return np.apply_along_axis(lambda c: np.convolve(c, k, mode="same"), 0, up)


def write_mini_fixture(directory: str | os.PathLike, seed: int = 7, size: int = MINI_SIZE) -> str:
    """Write rasters, a FIRMS CSV and ``pipeline.cfg``; returns the config path."""
    d = os.fspath(directory)
    os.makedirs(os.path.join(d, "scenes"), exist_ok=True)
    rng = np.random.default_rng(seed)
    geom = mini_geometry(size)
    shape = geom.shape

    dem = np.round(300 + 120 * _smooth(rng, shape) + rng.normal(0, 5, shape))
    write_raster(RasterGrid(geom, dem), os.path.join(d, "dem.tif"), "Elevation")
    temp = 296 + 2.5 * _smooth(rng, shape)
    precip = np.exp(np.log(60) + 0.4 * _smooth(rng, shape))
    smi = np.clip(0.13 + 0.05 * _smooth(rng, shape), 0.02, 0.9)
    # climate rasters come at a coarser 1 km grid and get resampled
    coarse = GridGeometry(size // 2, size // 2, geom.origin_x, geom.origin_y, 1000.0, -1000.0, MINI_CRS)
    for name, arr in (("mean_temperature", temp), ("total_precipitation", precip), ("smi", smi)):
        write_raster(RasterGrid(coarse, arr[::2, ::2]), os.path.join(d, f"{name}.tif"), name)

    lines = ["[meta]", "version = 1", "", "[inputs]", "firms = firms.csv", "dem = dem.tif",
             "mean_temperature = mean_temperature.tif",
             "total_precipitation = total_precipitation.tif", "smi = smi.tif", "", "[landsat]"]
    for year in MINI_YEARS:
        pre_files = []
        base = landsat_bands(rng, shape)
        veg = _smooth(rng, shape)
        base["SR_B5"] = base["SR_B5"] * 0.4 + 12000 + 2500 * veg
        for k in range(2):
            scene = {n: v * rng.normal(1.0, 0.01, shape) if v.std() > 0 else v.copy() for n, v in base.items()}
            if k == 1:
                scene["SR_B4"][0, :3] = np.nan  # cloud gap filled by the other scene
            arrays = {SCHEMA.index_of(n): a for n, a in scene.items()}
            if year == MINI_YEARS[0]:
                # Landsat 7 era export: no aerosol QA band
                arrays.pop(SCHEMA.index_of("SR_QA_AEROSOL"))
            path = os.path.join("scenes", f"pre_{year}_{k}.tif")
            _write_partial_stack(geom, arrays, os.path.join(d, path))
            pre_files.append(path)
        burn = np.clip(
            0.15 * _zscore(veg) + 0.1 * _zscore(temp) - 0.05 * _zscore(precip) + rng.normal(0, 0.03, shape),
            -0.2, None,
        ) + 0.1
        post = dict(base)
        post["SR_B5"] = base["SR_B5"] * (1 - 0.6 * np.clip(burn, 0, None))
        post["SR_B7"] = base["SR_B7"] * (1 + 0.8 * np.clip(burn, 0, None))
        post["SR_B5"][-1, -2:] = np.nan  # no valid post-fire value: target nodata
        arrays = {SCHEMA.index_of(n): a for n, a in post.items()}
        path = os.path.join("scenes", f"post_{year + 1}.tif")
        _write_partial_stack(geom, arrays, os.path.join(d, path))
        lines.append(f"{year}.pre = {', '.join(pre_files)}")
        lines.append(f"{year}.post = {path}")

    write_firms_csv(_mini_events(rng), os.path.join(d, "firms.csv"))
    lines += [
        "", "[grid]", "pixel_size = 500", "",
        "[model]", "n_estimators = 40", "learning_rate = 0.1", "max_depth = 4",
        "subsample = 0.8", "colsample = 0.8", "seed = 11", "",
        "[output]", "directory = out", "figures = true", "",
    ]
    cfg = os.path.join(d, "pipeline.cfg")
    with open(cfg, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
    return cfg


def _write_partial_stack(geom, arrays, path):
    """Write only the given bands, described by name (no zero-fill)."""
    import rasterio

    idx = sorted(arrays)
    data = np.stack([arrays[i] for i in idx]).astype(np.float32)
    data[np.isnan(data)] = -9999.0
    with rasterio.open(
        path, "w", driver="GTiff", width=geom.width, height=geom.height, count=len(idx),
        dtype="float32", nodata=-9999.0, transform=geom.transform(), crs=geom.crs_id,
    ) as dst:
        dst.write(data)
        for k, i in enumerate(idx, start=1):
            dst.set_band_description(k, SCHEMA[i].name)


def _mini_events(rng, n: int = 400) -> list[FireEvent]:
    start = date(2019, 1, 1)
    events = []
    for _ in range(n):
        day = start + timedelta(days=int(rng.integers(0, 730)))
        events.append(
            FireEvent(
                latitude=float(np.round(rng.uniform(-35, -12), 4)),
                longitude=float(np.round(rng.uniform(115, 153), 4)),
                acq_date=day,
                acq_time=int(rng.integers(0, 24)) * 60 + int(rng.integers(0, 60)),
                brightness=float(np.round(rng.uniform(300, 420), 1)),
                scan=float(np.round(rng.uniform(1.0, 4.0), 1)),
                track=float(np.round(rng.uniform(1.0, 2.0), 1)),
                confidence=float(rng.integers(0, 101)),
                frp=float(np.round(rng.gamma(1.5, 30.0), 1)),
                bright_t31=float(np.round(rng.uniform(280, 320), 1)),
                satellite="Terra" if rng.random() < 0.5 else "Aqua",
                daynight="D" if rng.random() < 0.7 else "N",
            )
        )
    events += events[:15]  # exact repeats for dedup
    return events


__all__ = [
    "benchmark_dataset",
    "benchmark_features",
    "landsat_bands",
    "linear_response_dataset",
    "mini_geometry",
    "write_mini_fixture",
]
