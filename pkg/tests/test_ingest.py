from datetime import date

import numpy as np
import pytest
import rasterio
import tifffile
from hypothesis import given, settings
from hypothesis import strategies as st

from fireseverity.errors import InputError, ValidationError
from fireseverity.ingest import (
    BandStack,
    FireEvent,
    GridGeometry,
    RasterGrid,
    fill_missing_bands,
    read_band_stack,
    read_firms_csv,
    read_raster,
    resample_to_grid,
    stack_from_arrays,
    write_band_stack,
    write_firms_csv,
    write_raster,
)
from fireseverity.schema import FEATURE_NAMES, N_BANDS, SCHEMA, TARGET_INDEX

HEADER = "latitude,longitude,brightness,scan,track,acq_date,acq_time,satellite,confidence,version,bright_t31,frp,daynight\n"
ROW = "-33.86,151.2,330.5,1.2,1.1,2019-12-01,0130,T,{conf},6.1NRT,290.1,{frp},D\n"


def geom(w=4, h=3, px=500.0):
    return GridGeometry(w, h, 1000.0, 5000.0, px, -px, "EPSG:3577")


def write_csv(path, rows):
    path.write_text(HEADER + "".join(rows))
    return path


# --- schema -----------------------------------------------------------------


def test_schema_has_36_ordered_bands():
    assert len(SCHEMA) == N_BANDS == 36
    assert [e.index for e in SCHEMA] == list(range(1, 37))
    assert SCHEMA[1].name == "SR_B1"
    assert SCHEMA[22].name == "QA_RADSAT"
    assert [SCHEMA[i].name for i in range(23, 30)] == ["NDVI", "NBR", "EVI", "NDWI", "BI", "SWIR1", "SWIR2"]
    assert [SCHEMA[i].name for i in range(30, 36)] == [
        "Elevation", "Slope", "TPI", "Mean_Temperature", "Total_Precipitation", "SMI"]
    assert SCHEMA[TARGET_INDEX].name == "dNBR"
    assert FEATURE_NAMES == SCHEMA.names[:35]


def test_schema_lookup_is_case_insensitive():
    assert SCHEMA.index_of("ndvi") == 23
    assert SCHEMA.has("Sr_B5")
    with pytest.raises(KeyError):
        SCHEMA.index_of("B99")


# --- FIRMS ------------------------------------------------------------------


def test_empty_csv_with_header_gives_no_events(tmp_path):
    read = read_firms_csv(write_csv(tmp_path / "f.csv", []))
    assert read.events == [] and read.rejections == []


def test_out_of_range_confidence_is_rejected_and_reported(tmp_path):
    p = write_csv(tmp_path / "f.csv", [ROW.format(conf=50, frp=10), ROW.format(conf=150, frp=10)])
    read = read_firms_csv(p)
    assert len(read.events) == 1
    assert len(read.rejections) == 1
    assert read.rejections[0].row_number == 2
    assert "confidence" in read.rejections[0].reason


def test_duplicates_survive_reading(tmp_path):
    rows = [ROW.format(conf=50, frp=10), ROW.format(conf=60, frp=10), ROW.format(conf=50, frp=10)]
    read = read_firms_csv(write_csv(tmp_path / "f.csv", rows))
    assert len(read.events) == 3
    assert read.events[0] == read.events[2]


def test_parsed_fields(tmp_path):
    read = read_firms_csv(write_csv(tmp_path / "f.csv", [ROW.format(conf=77, frp=12.5)]))
    e = read.events[0]
    assert e.acq_date == date(2019, 12, 1)
    assert e.acq_time == 90
    assert e.satellite == "Terra" and e.daynight == "D"
    assert (e.confidence, e.frp, e.scan, e.track) == (77.0, 12.5, 1.2, 1.1)


@pytest.mark.parametrize(
    "bad, reason",
    [
        ("-33.86,151.2,330.5,1.2,1.1,2019-13-01,0130,T,50,6,290,10,D\n", "acq_date"),
        ("-33.86,151.2,330.5,1.2,1.1,2019-12-01,2460,T,50,6,290,10,D\n", "acq_time"),
        ("-33.86,151.2,330.5,1.2,1.1,2019-12-01,0130,X,50,6,290,10,D\n", "satellite"),
        ("-33.86,151.2,330.5,0,1.1,2019-12-01,0130,T,50,6,290,10,D\n", "scan"),
        ("-33.86,151.2,330.5,1.2,1.1,2019-12-01,0130,T,50,6,290,-1,D\n", "frp"),
        ("-33.86,151.2,330.5,1.2,1.1,2019-12-01,0130,T,50,6,290,nan,D\n", "frp"),
        ("-33.86,151.2\n", "fields"),
    ],
)
def test_malformed_rows_are_rejected_not_fatal(tmp_path, bad, reason):
    read = read_firms_csv(write_csv(tmp_path / "f.csv", [ROW.format(conf=50, frp=1), bad]))
    assert len(read.events) == 1
    assert reason in read.rejections[0].reason


def test_missing_column_is_an_input_error(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("latitude,longitude\n1,2\n")
    with pytest.raises(InputError, match="frp"):
        read_firms_csv(p)


def test_missing_file_names_the_path(tmp_path):
    with pytest.raises(InputError, match="nope.csv"):
        read_firms_csv(tmp_path / "nope.csv")


def test_event_store_round_trip(tmp_path):
    rows = [ROW.format(conf=c, frp=f) for c, f in ((10, 1.5), (99, 300.25))]
    read = read_firms_csv(write_csv(tmp_path / "f.csv", rows))
    write_firms_csv(read.events, tmp_path / "store.csv")
    assert read_firms_csv(tmp_path / "store.csv").events == read.events


def test_fire_event_validates_on_construction():
    with pytest.raises(ValueError, match="latitude"):
        FireEvent(95, 0, date(2020, 1, 1), 0, 300, 1, 1, 50, 10)


# --- band stacks ------------------------------------------------------------


def full_stack(g, rng):
    return stack_from_arrays(g, {i: rng.normal(size=g.shape) for i in range(1, 37)})


def test_36_band_file_reads_complete(tmp_path, rng):
    s = full_stack(geom(), rng)
    write_band_stack(s, tmp_path / "s.tif")
    back = read_band_stack(tmp_path / "s.tif")
    assert back.complete and len(back.bands) == 36


def test_20_band_file_has_16_absent_bands(tmp_path, rng):
    g = geom()
    arr = rng.uniform(0, 1, size=(20,) + g.shape).astype(np.float32)
    with rasterio.open(tmp_path / "l5.tif", "w", driver="GTiff", width=g.width, height=g.height,
                       count=20, dtype="float32", transform=g.transform(), crs=g.crs_id) as dst:
        dst.write(arr)
    s = read_band_stack(tmp_path / "l5.tif")
    assert len(s.bands) == 20
    assert len(s.missing) == 16
    assert np.array_equal(s.band(3).values, arr[2].astype(np.float64))


def test_bands_matched_by_description(tmp_path, rng):
    g = geom()
    a, b = rng.normal(size=g.shape), rng.normal(size=g.shape)
    with rasterio.open(tmp_path / "d.tif", "w", driver="GTiff", width=g.width, height=g.height,
                       count=2, dtype="float64", transform=g.transform(), crs=g.crs_id) as dst:
        dst.write(np.stack([a, b]))
        dst.set_band_description(1, "SR_B7")
        dst.set_band_description(2, "SMI")
    s = read_band_stack(tmp_path / "d.tif")
    assert sorted(s.bands) == [7, 35]
    assert np.array_equal(s.band("SMI").values, b)


def test_inconsistent_band_dimensions_rejected(tmp_path):
    p = tmp_path / "bad.tif"
    with tifffile.TiffWriter(p) as tw:
        tw.write(np.zeros((4, 4), np.float32))
        tw.write(np.zeros((5, 4), np.float32))
    with pytest.raises(InputError, match="dimension"):
        read_band_stack(p)


def test_stack_rejects_mismatched_band_geometry(rng):
    g = geom()
    with pytest.raises(ValidationError, match="dimension mismatch"):
        BandStack(g, {1: RasterGrid(g, np.zeros(g.shape)), 2: RasterGrid(geom(5, 3), np.zeros((3, 5)))})


def test_fill_complete_stack_is_identity(rng):
    s = full_stack(geom(), rng)
    assert fill_missing_bands(s) is s


def test_fill_missing_aerosol_band_with_zero(rng):
    g = geom()
    s = stack_from_arrays(g, {i: rng.normal(size=g.shape) for i in range(1, 37) if i != 8})
    f = fill_missing_bands(s)
    assert f.complete
    assert np.all(f.band("SR_QA_AEROSOL").values == 0.0)
    for i in range(1, 37):
        if i != 8:
            assert np.array_equal(f.band(i).values, s.band(i).values)


def test_fill_empty_stack_gives_36_zero_bands():
    g = geom()
    f = fill_missing_bands(BandStack(g, {}))
    assert f.complete
    assert np.all(f.to_array() == 0.0)


def test_stack_write_read_float32_identical(tmp_path, rng):
    g = geom(7, 5)
    s = full_stack(g, rng)
    arr = s.to_array()
    arr[3, 1, 2] = np.nan
    s = stack_from_arrays(g, {i + 1: arr[i] for i in range(36)})
    write_band_stack(s, tmp_path / "s.tif")
    back = read_band_stack(tmp_path / "s.tif")
    assert back.geometry == g
    want = arr.astype(np.float32).astype(np.float64)
    assert np.array_equal(back.to_array(), want, equal_nan=True)


def test_writing_incomplete_stack_is_an_error(tmp_path, rng):
    g = geom()
    s = stack_from_arrays(g, {i: rng.normal(size=g.shape) for i in range(1, 36)})
    with pytest.raises(ValidationError, match="dNBR"):
        write_band_stack(s, tmp_path / "s.tif")


def test_written_stack_opens_in_gdal(tmp_path, rng):
    g = geom(2, 2)
    write_band_stack(full_stack(g, rng), tmp_path / "s.tif")
    with rasterio.open(tmp_path / "s.tif") as ds:
        assert ds.count == 36
        assert ds.crs.to_epsg() == 3577
        assert ds.descriptions[35] == "dNBR"
        assert ds.nodata == -9999.0


def test_single_raster_round_trip(tmp_path, rng):
    g = geom()
    grid = RasterGrid(g, rng.normal(size=g.shape))
    write_raster(grid, tmp_path / "r.tif", "Elevation")
    back = read_raster(tmp_path / "r.tif")
    assert np.array_equal(back.values, grid.values.astype(np.float32))


# --- resampling -------------------------------------------------------------


def test_nearest_on_identical_geometry_is_identity(rng):
    g = geom()
    grid = RasterGrid(g, rng.normal(size=g.shape))
    assert np.array_equal(resample_to_grid(grid, g, "nearest").values, grid.values)


@settings(max_examples=40, deadline=None)
@given(
    value=st.floats(-1e6, 1e6, allow_nan=False),
    w=st.integers(1, 9),
    h=st.integers(1, 9),
    px=st.sampled_from([100.0, 250.0, 500.0, 1000.0]),
)
def test_bilinear_preserves_constants(value, w, h, px):
    src = RasterGrid.constant(geom(6, 6, 500.0), value)
    out = resample_to_grid(src, GridGeometry(w, h, 1000.0, 5000.0, px, -px, "EPSG:3577"), "bilinear")
    valid = ~np.isnan(out.values)
    assert valid.any()
    assert np.allclose(out.values[valid], value, rtol=1e-12, atol=0)


def test_bilinear_refinement_hand_computed():
    src = RasterGrid(GridGeometry(2, 2, 0.0, 0.0, 2.0, -2.0, "X"), np.array([[0.0, 2.0], [4.0, 6.0]]))
    out = resample_to_grid(src, GridGeometry(4, 4, 0.0, 0.0, 1.0, -1.0, "X"), "bilinear").values
    # source centres sit at target positions 0.5 apart; interior cells
    # interpolate, outer cells clamp to the nearest source centre row/column
    x = np.array([0.0, 0.5, 1.5, 2.0])  # column contribution (0..2)
    yv = np.array([0.0, 1.0, 3.0, 4.0])  # row contribution (0..4)
    assert np.allclose(out, yv[:, None] + x[None, :], atol=1e-12)


def test_resample_crs_mismatch():
    src = RasterGrid.constant(geom(), 1.0)
    other = GridGeometry(4, 3, 1000.0, 5000.0, 500.0, -500.0, "EPSG:4326")
    with pytest.raises(ValidationError, match="CRS"):
        resample_to_grid(src, other)


def test_bilinear_skips_nodata_neighbours():
    src = RasterGrid(GridGeometry(2, 1, 0.0, 0.0, 2.0, -2.0, "X"), np.array([[5.0, np.nan]]))
    out = resample_to_grid(src, GridGeometry(4, 1, 0.0, 0.0, 1.0, -1.0, "X"), "bilinear").values
    # the last cell's only in-bounds neighbour is nodata
    assert np.array_equal(out, [[5.0, 5.0, 5.0, np.nan]], equal_nan=True)
