"""Spectral indices (bands 23-29), seasonal compositing and dNBR (band 36).

Formulas run on the stored surface-reflectance values without rescaling;
the EVI "+1" term therefore acts on raw digital numbers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import date
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .ingest import BandStack, RasterGrid

FIRST_FIRE_YEAR = 2012
LAST_FIRE_YEAR = 2023


class IndexId(enum.Enum):
    NDVI = 23
    NBR = 24
    EVI = 25
    NDWI = 26
    BI = 27
    SWIR1 = 28
    SWIR2 = 29

    @property
    def band_index(self) -> int:
        return self.value


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.full(num.shape, np.nan)
    ok = ~np.isnan(num) & ~np.isnan(den) & (den != 0)
    out[ok] = num[ok] / den[ok]
    return out


def normalized_difference(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a - b) / (a + b); NaN where an operand is NaN or the sum is 0."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return _ratio(a - b, a + b)


def evi(nir, red, blue) -> np.ndarray:
    nir, red, blue = (np.asarray(v, dtype=np.float64) for v in (nir, red, blue))
    return 2.5 * _ratio(nir - red, nir + 6.0 * red - 7.5 * blue + 1.0)


_SOURCES = {
    IndexId.NDVI: ("SR_B5", "SR_B4"),
    IndexId.NBR: ("SR_B5", "SR_B7"),
    IndexId.EVI: ("SR_B5", "SR_B4", "SR_B2"),
    IndexId.NDWI: ("SR_B3", "SR_B5"),
    IndexId.BI: ("SR_B7", "SR_B5"),
    IndexId.SWIR1: ("SR_B6",),
    IndexId.SWIR2: ("SR_B7",),
}


def index_array(index: IndexId, bands: dict[str, np.ndarray]) -> np.ndarray:
    """Evaluate one index on plain arrays keyed by Landsat band name."""
    ops = [np.asarray(bands[name], dtype=np.float64) for name in _SOURCES[index]]
    if index is IndexId.EVI:
        return evi(*ops)
    if len(ops) == 1:
        return ops[0].copy()
    return normalized_difference(*ops)


def compute_index(stack: BandStack, index: IndexId | str) -> RasterGrid:
    if isinstance(index, str):
        index = IndexId[index.upper()]
    missing = [n for n in _SOURCES[index] if n not in stack]
    if missing:
        raise ValidationError(f"{index.name} needs absent band(s): {', '.join(missing)}")
    bands = {n: stack.band(n).values for n in _SOURCES[index]}
    return RasterGrid(stack.geometry, index_array(index, bands))


def compute_all_indices(stack: BandStack) -> BandStack:
    return stack.with_bands({i.band_index: compute_index(stack, i) for i in IndexId})


@dataclass(frozen=True)
class FireYearWindows:
    year: int
    pre_start: date
    pre_end: date
    post_start: date
    post_end: date


def fire_year_windows(year: int) -> FireYearWindows:
    """Pre-fire July 1 - September 30; post-fire February 1 - March 30 next year."""
    if not FIRST_FIRE_YEAR <= year <= LAST_FIRE_YEAR:
        raise ValidationError(
            f"fire year {year} outside supported range {FIRST_FIRE_YEAR}-{LAST_FIRE_YEAR}"
        )
    return FireYearWindows(
        year,
        date(year, 7, 1),
        date(year, 9, 30),
        date(year + 1, 2, 1),
        date(year + 1, 3, 30),
    )


def composite(scenes: Sequence[RasterGrid], statistic: str = "median") -> RasterGrid:
    """Per-pixel median or mean over the valid values of several scenes."""
    if not scenes:
        raise ValidationError("composite needs at least one scene")
    geom = scenes[0].geometry
    if any(s.geometry != geom for s in scenes):
        raise ValidationError("composite scenes do not share a geometry")
    if len(scenes) == 1:
        return scenes[0]
    cube = np.stack([s.values for s in scenes])
    allnan = np.isnan(cube).all(axis=0)
    fill = np.where(allnan, 0.0, np.nan)  # keep nan-reducers quiet on empty pixels
    cube = np.where(allnan[None], fill[None], cube)
    stat = statistic.lower()
    if stat == "median":
        out = np.nanmedian(cube, axis=0)
    elif stat == "mean":
        out = np.nanmean(cube, axis=0)
    else:
        raise ValueError(f"unknown composite statistic {statistic!r}")
    out[allnan] = np.nan
    return RasterGrid(geom, out)


def composite_stacks(stacks: Sequence[BandStack], statistic: str = "median") -> BandStack:
    """Band-wise composite of several stacks sharing one geometry.

    Each band is composited over the stacks that carry it.
    """
    if not stacks:
        raise ValidationError("composite needs at least one stack")
    present = sorted(set().union(*(s.bands for s in stacks)))
    bands = {
        i: composite([s.bands[i] for s in stacks if i in s.bands], statistic) for i in present
    }
    return BandStack(stacks[0].geometry, bands, stacks[0].schema)


def dnbr(pre_nbr: RasterGrid, post_nbr: RasterGrid) -> RasterGrid:
    """Pre-fire NBR minus post-fire NBR; positive means burn damage."""
    if pre_nbr.geometry != post_nbr.geometry:
        raise ValidationError("pre- and post-fire NBR do not share a geometry")
    return RasterGrid(pre_nbr.geometry, pre_nbr.values - post_nbr.values)
