"""Slope (Horn 3x3), circular focal mean and topographic position index."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .ingest import RasterGrid

TPI_RADIUS_M = 500.0


@dataclass(frozen=True)
class FocalWindow:
    radius: float
    offsets: tuple[tuple[int, int], ...]  # (drow, dcol), centre included


def focal_window(radius: float, cell_x: float, cell_y: float) -> FocalWindow:
    """Cells whose centre lies within ``radius`` of the centre cell."""
    if radius <= 0:
        raise ValidationError("focal radius must be positive")
    cx, cy = abs(cell_x), abs(cell_y)
    nr = int(radius // cy) + 1
    nc = int(radius // cx) + 1
    lim = radius * radius * (1.0 + 1e-12)
    offs = [
        (dr, dc)
        for dr in range(-nr, nr + 1)
        for dc in range(-nc, nc + 1)
        if (dr * cy) ** 2 + (dc * cx) ** 2 <= lim
    ]
    return FocalWindow(radius, tuple(offs))


def _shifted(a: np.ndarray, dr: int, dc: int, fill=np.nan) -> np.ndarray:
    """out[r, c] = a[r + dr, c + dc], ``fill`` outside the array."""
    h, w = a.shape
    out = np.full(a.shape, fill, dtype=a.dtype)
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r0 < r1 and c0 < c1:
        out[r0:r1, c0:c1] = a[r0 + dr: r1 + dr, c0 + dc: c1 + dc]
    return out


def _pixel_sizes(grid: RasterGrid, meters_per_unit: float) -> tuple[float, float]:
    px = abs(grid.geometry.pixel_size_x) * meters_per_unit
    py = abs(grid.geometry.pixel_size_y) * meters_per_unit
    if not (px > 0 and py > 0):
        raise ValidationError("pixel size must be positive")
    return px, py


def focal_mean(grid: RasterGrid, radius: float = TPI_RADIUS_M, meters_per_unit: float = 1.0) -> RasterGrid:
    """Mean of valid cells in a circular window; windows shrink at the edges."""
    px, py = _pixel_sizes(grid, meters_per_unit)
    win = focal_window(radius, px, py)
    z = grid.values
    total = np.zeros(z.shape)
    count = np.zeros(z.shape)
    for dr, dc in win.offsets:
        s = _shifted(z, dr, dc)
        ok = ~np.isnan(s)
        total[ok] += s[ok]
        count += ok
    out = np.full(z.shape, np.nan)
    has = count > 0
    out[has] = total[has] / count[has]
    return RasterGrid(grid.geometry, out)


def tpi(dem: RasterGrid, radius: float = TPI_RADIUS_M, meters_per_unit: float = 1.0) -> RasterGrid:
    """Elevation minus the focal mean of elevation (window includes the centre).

    Accumulated as the mean of centre-minus-neighbour differences, so adding a
    constant to an exactly representable DEM leaves the result bit-identical.
    Cells that are themselves nodata stay nodata.
    """
    px, py = _pixel_sizes(dem, meters_per_unit)
    win = focal_window(radius, px, py)
    z = dem.values
    total = np.zeros(z.shape)
    count = np.zeros(z.shape)
    for dr, dc in win.offsets:
        s = _shifted(z, dr, dc)
        ok = ~np.isnan(s)
        total[ok] += (z - s)[ok]
        count += ok
    out = np.full(z.shape, np.nan)
    has = (count > 0) & ~np.isnan(z)
    out[has] = total[has] / count[has]
    return RasterGrid(dem.geometry, out)


def _horn_component(z: np.ndarray, axis: int, step: float, strict: bool) -> tuple[np.ndarray, np.ndarray]:
    """Weighted (1, 2, 1) central difference along ``axis``.

    At borders the missing side collapses onto the centre cell (one-sided
    difference over one step) and absent cross rows/columns drop out of the
    weighting.  Returns the derivative and a mask of cells that had nodata
    among their required neighbours.
    """
    if axis == 0:
        z = z.T
    h, w = z.shape
    cols = np.arange(w)
    right = np.minimum(cols + 1, w - 1)
    left = np.maximum(cols - 1, 0)
    span = (right - left) * step
    num = np.zeros((h, w))
    wsum = np.zeros((h, w))
    bad = np.zeros((h, w), dtype=bool)
    center = z
    for dr, wt in ((-1, 1.0), (0, 2.0), (1, 1.0)):
        rows = np.arange(h) + dr
        exists = (rows >= 0) & (rows < h)
        rr = np.clip(rows, 0, h - 1)
        zr = z[rr][:, right]
        zl = z[rr][:, left]
        if not strict:
            zr = np.where(np.isnan(zr), center, zr)
            zl = np.where(np.isnan(zl), center, zl)
        d = np.where(span > 0, (zr - zl) / np.where(span > 0, span, 1.0), 0.0)
        e = exists[:, None] & np.ones((1, w), dtype=bool)
        bad |= e & np.isnan(d)
        num += np.where(e, wt * np.nan_to_num(d), 0.0)
        wsum += np.where(e, wt, 0.0)
    out = num / wsum
    if axis == 0:
        return out.T, bad.T
    return out, bad


def slope(dem: RasterGrid, meters_per_unit: float = 1.0, strict: bool = True) -> RasterGrid:
    """Slope in degrees from Horn's 3x3 finite differences.

    ``strict`` makes a cell nodata when any neighbour used by its window is
    nodata; otherwise nodata neighbours are replaced by the centre value.
    """
    px, py = _pixel_sizes(dem, meters_per_unit)
    z = dem.values
    dzdx, badx = _horn_component(z, 1, px, strict)
    dzdy, bady = _horn_component(z, 0, py, strict)
    out = np.degrees(np.arctan(np.hypot(dzdx, dzdy)))
    out[badx | bady | np.isnan(z)] = np.nan
    return RasterGrid(dem.geometry, out)
