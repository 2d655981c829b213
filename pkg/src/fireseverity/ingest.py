"""Readers and writers for FIRMS detections and multi-band GeoTIFF stacks.

Rasters are held as float64 arrays with NaN marking nodata.  On disk the
sentinel is -9999 (GeoTIFF nodata tag) because NaN support differs between
GIS tools.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, replace
from datetime import date, datetime
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError, ValidationError
from .schema import N_BANDS, SCHEMA, BandSchema

DISK_NODATA = -9999.0

FIRMS_REQUIRED = (
    "latitude",
    "longitude",
    "acq_date",
    "acq_time",
    "confidence",
    "frp",
    "brightness",
    "scan",
    "track",
)

_SATELLITES = {"terra": "Terra", "t": "Terra", "aqua": "Aqua", "a": "Aqua"}


# --------------------------------------------------------------------------
# FIRMS detections


@dataclass(frozen=True)
class FireEvent:
    latitude: float
    longitude: float
    acq_date: date
    acq_time: int  # minutes after 00:00 UTC
    brightness: float
    scan: float
    track: float
    confidence: float
    frp: float
    bright_t31: float | None = None
    satellite: str | None = None
    daynight: str | None = None

    def __post_init__(self):
        problems = event_problems(self)
        if problems:
            raise ValueError("; ".join(problems))


def event_problems(e: FireEvent) -> list[str]:
    out = []
    if not -90.0 <= e.latitude <= 90.0:
        out.append(f"latitude {e.latitude} outside [-90, 90]")
    if not -180.0 <= e.longitude <= 180.0:
        out.append(f"longitude {e.longitude} outside [-180, 180]")
    if not 0.0 <= e.confidence <= 100.0:
        out.append(f"confidence {e.confidence} outside [0, 100]")
    if not e.frp >= 0.0:
        out.append(f"frp {e.frp} negative")
    if not e.scan > 0.0:
        out.append(f"scan {e.scan} not positive")
    if not e.track > 0.0:
        out.append(f"track {e.track} not positive")
    if not 0 <= e.acq_time < 24 * 60:
        out.append(f"acq_time {e.acq_time} outside the day")
    for name in ("brightness", "bright_t31"):
        v = getattr(e, name)
        if v is not None and not math.isfinite(v):
            out.append(f"{name} not finite")
    return out


@dataclass(frozen=True)
class Rejection:
    row_number: int  # 1-based data row, header excluded
    reason: str


@dataclass(frozen=True)
class FirmsRead:
    events: list[FireEvent]
    rejections: list[Rejection]


def _hhmm_to_minutes(text: str) -> int:
    raw = text.strip()
    if not raw.isdigit() or len(raw) > 4:
        raise ValueError(f"acq_time {text!r} is not HHMM")
    v = int(raw)
    hh, mm = divmod(v, 100)
    if hh > 23 or mm > 59:
        raise ValueError(f"acq_time {text!r} is not a valid time")
    return hh * 60 + mm


def _finite(text: str, name: str) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ValueError(f"{name} {text!r} is not a number") from None
    if not math.isfinite(v):
        raise ValueError(f"{name} {text!r} is not finite")
    return v


def _parse_row(row: Mapping[str, str]) -> FireEvent:
    sat = row.get("satellite")
    if sat is not None and sat.strip():
        try:
            sat = _SATELLITES[sat.strip().lower()]
        except KeyError:
            raise ValueError(f"satellite {sat!r} is not Terra/Aqua") from None
    else:
        sat = None
    dn = row.get("daynight")
    if dn is not None and dn.strip():
        dn = dn.strip().upper()
        if dn not in ("D", "N"):
            raise ValueError(f"daynight {dn!r} is not D/N")
    else:
        dn = None
    t31 = row.get("bright_t31")
    try:
        acq_date = datetime.strptime(row["acq_date"].strip(), "%Y-%m-%d").date()
    except ValueError:
        raise ValueError(f"acq_date {row['acq_date']!r} is not YYYY-MM-DD") from None
    return FireEvent(
        latitude=_finite(row["latitude"], "latitude"),
        longitude=_finite(row["longitude"], "longitude"),
        acq_date=acq_date,
        acq_time=_hhmm_to_minutes(row["acq_time"]),
        brightness=_finite(row["brightness"], "brightness"),
        scan=_finite(row["scan"], "scan"),
        track=_finite(row["track"], "track"),
        confidence=_finite(row["confidence"], "confidence"),
        frp=_finite(row["frp"], "frp"),
        bright_t31=_finite(t31, "bright_t31") if t31 not in (None, "") else None,
        satellite=sat,
        daynight=dn,
    )


def read_firms_csv(path: str | os.PathLike) -> FirmsRead:
    """Parse a MODIS FIRMS archive CSV.

    Bad rows are skipped and reported in ``rejections``; only a missing file
    or a missing mandatory column aborts the read.
    """
    if not os.path.isfile(path):
        raise InputError(f"FIRMS file not found: {os.fspath(path)}")
    events: list[FireEvent] = []
    rejections: list[Rejection] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip().lower() for h in (reader.fieldnames or [])]
        missing = [c for c in FIRMS_REQUIRED if c not in header]
        if missing:
            raise InputError(
                f"{os.fspath(path)}: missing FIRMS column(s): {', '.join(missing)}"
            )
        reader.fieldnames = header
        for i, row in enumerate(reader, start=1):
            if None in row or any(row.get(c) is None for c in FIRMS_REQUIRED):
                rejections.append(Rejection(i, "wrong number of fields"))
                continue
            try:
                events.append(_parse_row(row))
            except ValueError as exc:
                rejections.append(Rejection(i, str(exc)))
    return FirmsRead(events, rejections)


EVENT_COLUMNS = (
    "latitude",
    "longitude",
    "brightness",
    "scan",
    "track",
    "acq_date",
    "acq_time",
    "satellite",
    "confidence",
    "bright_t31",
    "frp",
    "daynight",
)


def write_firms_csv(events: Iterable[FireEvent], path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVENT_COLUMNS)
        for e in events:
            hh, mm = divmod(e.acq_time, 60)
            w.writerow(
                [
                    repr(e.latitude),
                    repr(e.longitude),
                    repr(e.brightness),
                    repr(e.scan),
                    repr(e.track),
                    e.acq_date.isoformat(),
                    f"{hh:02d}{mm:02d}",
                    e.satellite or "",
                    repr(e.confidence),
                    "" if e.bright_t31 is None else repr(e.bright_t31),
                    repr(e.frp),
                    e.daynight or "",
                ]
            )


def write_rejections(rejections: Iterable[Rejection], path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row_number", "reason"])
        for r in rejections:
            w.writerow([r.row_number, r.reason])


# --------------------------------------------------------------------------
# Rasters


@dataclass(frozen=True)
class GridGeometry:
    width: int
    height: int
    origin_x: float
    origin_y: float
    pixel_size_x: float
    pixel_size_y: float  # negative for north-up
    crs_id: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def transform(self):
        from affine import Affine

        return Affine(
            self.pixel_size_x, 0.0, self.origin_x, 0.0, self.pixel_size_y, self.origin_y
        )

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """World x of each column centre and y of each row centre."""
        xs = self.origin_x + (np.arange(self.width) + 0.5) * self.pixel_size_x
        ys = self.origin_y + (np.arange(self.height) + 0.5) * self.pixel_size_y
        return xs, ys


@dataclass(frozen=True)
class RasterGrid:
    geometry: GridGeometry
    values: np.ndarray
    nodata: float = math.nan

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.shape != self.geometry.shape:
            raise ValidationError(
                f"raster values shape {v.shape} != geometry {self.geometry.shape}"
            )
        if not math.isnan(self.nodata):
            v[v == self.nodata] = np.nan
        if np.isinf(v).any():
            raise ValidationError("raster contains infinite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "nodata", math.nan)

    @property
    def width(self) -> int:
        return self.geometry.width

    @property
    def height(self) -> int:
        return self.geometry.height

    @property
    def valid(self) -> np.ndarray:
        return ~np.isnan(self.values)

    @classmethod
    def constant(cls, geometry: GridGeometry, value: float) -> "RasterGrid":
        return cls(geometry, np.full(geometry.shape, value, dtype=np.float64))

    def with_values(self, values: np.ndarray) -> "RasterGrid":
        return RasterGrid(self.geometry, values)


@dataclass(frozen=True)
class BandStack:
    geometry: GridGeometry
    bands: Mapping[int, RasterGrid] = field(default_factory=dict)
    schema: BandSchema = SCHEMA

    def __post_init__(self):
        bands = dict(sorted(self.bands.items()))
        for idx, grid in bands.items():
            if not 1 <= idx <= len(self.schema):
                raise ValidationError(f"band index {idx} outside schema")
            if grid.geometry != self.geometry:
                raise ValidationError(
                    f"band {idx} ({self.schema[idx].name}) geometry differs from stack: "
                    f"dimension mismatch {grid.geometry.shape} vs {self.geometry.shape}"
                )
        object.__setattr__(self, "bands", bands)

    def __contains__(self, key: int | str) -> bool:
        return self._index(key) in self.bands

    def _index(self, key: int | str) -> int:
        return key if isinstance(key, int) else self.schema.index_of(key)

    def band(self, key: int | str) -> RasterGrid:
        idx = self._index(key)
        try:
            return self.bands[idx]
        except KeyError:
            raise ValidationError(
                f"band {idx} ({self.schema[idx].name}) is absent from the stack"
            ) from None

    @property
    def missing(self) -> list[int]:
        return [e.index for e in self.schema if e.index not in self.bands]

    @property
    def complete(self) -> bool:
        return not self.missing

    def with_bands(self, new: Mapping[int | str, RasterGrid]) -> "BandStack":
        merged = dict(self.bands)
        for k, v in new.items():
            merged[self._index(k)] = v
        return replace(self, bands=merged)

    def to_array(self) -> np.ndarray:
        """(36, height, width) array; absent bands are NaN."""
        out = np.full((len(self.schema),) + self.geometry.shape, np.nan)
        for idx, g in self.bands.items():
            out[idx - 1] = g.values
        return out


def fill_missing_bands(stack: BandStack) -> BandStack:
    """Add every absent schema band as a constant raster of its fill value."""
    if stack.complete:
        return stack
    filled = {
        i: RasterGrid.constant(stack.geometry, stack.schema[i].fill_if_missing)
        for i in stack.missing
    }
    return stack.with_bands(filled)


def _check_tiff_pages(path: str) -> None:
    import tifffile

    try:
        with tifffile.TiffFile(path) as tf:
            shapes = {
                (p.imagelength, p.imagewidth)
                for p in tf.pages
                if not getattr(p, "is_reduced", False)
            }
    except Exception:
        return  # rasterio reports unreadable files with a better message
    if len(shapes) > 1:
        raise InputError(f"{path}: inconsistent per-band dimensions {sorted(shapes)}")


def read_raster(path: str | os.PathLike, band: int = 1) -> RasterGrid:
    """Single band of any GDAL-readable raster."""
    import rasterio

    p = os.fspath(path)
    if not os.path.isfile(p):
        raise InputError(f"raster not found: {p}")
    try:
        with rasterio.open(p) as ds:
            geom = _geometry_of(ds)
            data = ds.read(band).astype(np.float64)
            nd = ds.nodata
    except rasterio.errors.RasterioError as exc:
        raise InputError(f"{p}: unreadable raster ({exc})") from None
    if nd is not None and not math.isnan(nd):
        data[data == nd] = np.nan
    return RasterGrid(geom, data)


def _geometry_of(ds) -> GridGeometry:
    t = ds.transform
    if t.b != 0 or t.d != 0:
        raise InputError(f"{ds.name}: rotated geotransforms are not supported")
    crs = ""
    if ds.crs is not None:
        crs = ds.crs.to_string()
    return GridGeometry(ds.width, ds.height, t.c, t.f, t.a, t.e, crs)


def read_band_stack(path: str | os.PathLike, schema: BandSchema = SCHEMA) -> BandStack:
    """Read a multi-band GeoTIFF into schema positions.

    Bands are matched by their description when every band carries a schema
    name, otherwise by position (file band i -> schema band i).
    """
    import rasterio

    p = os.fspath(path)
    if not os.path.isfile(p):
        raise InputError(f"band stack not found: {p}")
    _check_tiff_pages(p)
    try:
        with rasterio.open(p) as ds:
            if ds.count > len(schema):
                raise InputError(f"{p}: {ds.count} bands exceeds the {len(schema)}-band schema")
            geom = _geometry_of(ds)
            data = ds.read().astype(np.float64)
            descriptions = list(ds.descriptions)
            nodatas = list(ds.nodatavals)
    except rasterio.errors.RasterioError as exc:
        raise InputError(f"{p}: unreadable raster ({exc})") from None

    named = [d for d in descriptions if d]
    if named and len(named) == len(descriptions):
        try:
            targets = [schema.index_of(d) for d in descriptions]
        except KeyError as exc:
            raise InputError(f"{p}: {exc.args[0]}") from None
        if len(set(targets)) != len(targets):
            raise InputError(f"{p}: duplicate band descriptions")
    else:
        targets = list(range(1, len(descriptions) + 1))

    bands = {}
    for k, idx in enumerate(targets):
        arr = data[k]
        nd = nodatas[k]
        if nd is not None and not math.isnan(nd):
            arr[arr == nd] = np.nan
        bands[idx] = RasterGrid(geom, arr)
    return BandStack(geom, bands, schema)


def write_band_stack(stack: BandStack, path: str | os.PathLike) -> None:
    """Write a complete stack as a 36-band float32 GeoTIFF."""
    import rasterio

    if not stack.complete:
        names = ", ".join(stack.schema[i].name for i in stack.missing)
        raise ValidationError(f"cannot write incomplete stack; absent bands: {names}")
    g = stack.geometry
    arr = stack.to_array().astype(np.float32)
    arr[np.isnan(arr)] = DISK_NODATA
    profile = dict(
        driver="GTiff",
        width=g.width,
        height=g.height,
        count=len(stack.schema),
        dtype="float32",
        nodata=DISK_NODATA,
        transform=g.transform(),
        compress="deflate",
    )
    if g.crs_id:
        profile["crs"] = g.crs_id
    try:
        with rasterio.open(os.fspath(path), "w", **profile) as dst:
            dst.write(arr)
            for e in stack.schema:
                dst.set_band_description(e.index, e.name)
    except (rasterio.errors.RasterioError, OSError) as exc:
        raise InputError(f"{os.fspath(path)}: cannot write ({exc})") from None


def write_raster(grid: RasterGrid, path: str | os.PathLike, description: str = "") -> None:
    import rasterio

    g = grid.geometry
    arr = grid.values.astype(np.float32)
    arr[np.isnan(arr)] = DISK_NODATA
    profile = dict(
        driver="GTiff", width=g.width, height=g.height, count=1, dtype="float32",
        nodata=DISK_NODATA, transform=g.transform(), compress="deflate",
    )
    if g.crs_id:
        profile["crs"] = g.crs_id
    with rasterio.open(os.fspath(path), "w", **profile) as dst:
        dst.write(arr, 1)
        if description:
            dst.set_band_description(1, description)


# --------------------------------------------------------------------------
# Resampling


def resample_to_grid(src: RasterGrid, target: GridGeometry, method: str = "nearest") -> RasterGrid:
    """Sample ``src`` at the cell centres of ``target`` (same CRS only).

    Bilinear weights of nodata or out-of-bounds neighbours are dropped and
    the remainder renormalised; a cell with no valid contributor is nodata.
    """
    sg = src.geometry
    if sg.crs_id != target.crs_id:
        raise ValidationError(f"CRS mismatch: {sg.crs_id!r} vs {target.crs_id!r}")
    if sg == target and method == "nearest":
        return src
    xs, ys = target.cell_centers()
    cols = (xs - sg.origin_x) / sg.pixel_size_x - 0.5
    rows = (ys - sg.origin_y) / sg.pixel_size_y - 0.5
    vals = src.values
    if method == "nearest":
        ci = np.floor(cols + 0.5).astype(np.int64)
        ri = np.floor(rows + 0.5).astype(np.int64)
        cin = (ci >= 0) & (ci < sg.width)
        rin = (ri >= 0) & (ri < sg.height)
        out = np.full(target.shape, np.nan)
        sub = vals[np.ix_(ri[rin], ci[cin])]
        out[np.ix_(rin, cin)] = sub
        return RasterGrid(target, out)
    if method != "bilinear":
        raise ValueError(f"unknown resampling method {method!r}")

    c0 = np.floor(cols).astype(np.int64)
    r0 = np.floor(rows).astype(np.int64)
    fc = cols - c0
    fr = rows - r0
    acc = np.zeros(target.shape)
    wsum = np.zeros(target.shape)
    for dr, wr in ((0, 1.0 - fr), (1, fr)):
        rr = r0 + dr
        rok = (rr >= 0) & (rr < sg.height)
        rrc = np.clip(rr, 0, sg.height - 1)
        for dc, wc in ((0, 1.0 - fc), (1, fc)):
            cc = c0 + dc
            cok = (cc >= 0) & (cc < sg.width)
            ccc = np.clip(cc, 0, sg.width - 1)
            v = vals[np.ix_(rrc, ccc)]
            w = np.outer(wr * rok, wc * cok)
            ok = (w > 0) & ~np.isnan(v)
            acc += np.where(ok, w * np.where(ok, v, 0.0), 0.0)
            wsum += np.where(ok, w, 0.0)
    out = np.full(target.shape, np.nan)
    has = wsum > 0
    out[has] = acc[has] / wsum[has]
    return RasterGrid(target, out)


def stack_from_arrays(geometry: GridGeometry, arrays: Mapping[int | str, np.ndarray]) -> BandStack:
    """Convenience constructor used by fixtures and the pipeline."""
    bands = {}
    for k, a in arrays.items():
        idx = k if isinstance(k, int) else SCHEMA.index_of(k)
        bands[idx] = RasterGrid(geometry, a)
    return BandStack(geometry, bands)


__all__ = [
    "BandStack",
    "DISK_NODATA",
    "FireEvent",
    "FirmsRead",
    "GridGeometry",
    "N_BANDS",
    "RasterGrid",
    "Rejection",
    "fill_missing_bands",
    "read_band_stack",
    "read_firms_csv",
    "read_raster",
    "resample_to_grid",
    "stack_from_arrays",
    "write_band_stack",
    "write_firms_csv",
    "write_raster",
    "write_rejections",
]
