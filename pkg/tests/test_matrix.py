import numpy as np
import pytest

from fireseverity.errors import InputError, ValidationError
from fireseverity.ingest import GridGeometry, stack_from_arrays
from fireseverity.matrix import FeatureMatrix, flatten_stack, read_matrix, write_matrix
from fireseverity.schema import SCHEMA

GEOM = GridGeometry(4, 4, 0.0, 0.0, 30.0, -30.0)


def full_stack(rng, target=None):
    arrays = {i: rng.normal(size=(4, 4)).astype(np.float32).astype(float) for i in range(1, 37)}
    if target is not None:
        arrays[36] = target
    return stack_from_arrays(GEOM, arrays)


def test_flatten_matches_brute_force(rng):
    target = rng.normal(size=(4, 4))
    target[1, 2] = target[3, 0] = np.nan
    stack = full_stack(rng, target)
    m = flatten_stack(stack, year=2020)
    rows, idx = [], []
    for r in range(4):
        for c in range(4):
            if np.isnan(target[r, c]):
                continue
            rows.append([stack.band(b).values[r, c] for b in range(1, 37)])
            idx.append([r, c, 2020])
    rows = np.array(rows)
    assert np.array_equal(m.features, rows[:, :35])
    assert np.array_equal(m.target, rows[:, 35])
    assert np.array_equal(m.row_index, idx)


def test_column_order_follows_band_schema(rng):
    m = flatten_stack(full_stack(rng))
    assert m.feature_names == tuple(SCHEMA.names[:35])
    assert m.target_name == "dNBR"
    assert m.feature_names[22:29] == ("NDVI", "NBR", "EVI", "NDWI", "BI", "SWIR1", "SWIR2")
    assert m.column("Elevation") is not None


def test_all_nodata_target_gives_empty(rng):
    m = flatten_stack(full_stack(rng, np.full((4, 4), np.nan)))
    assert m.n_rows == 0 and m.n_features == 35


def test_feature_nodata_kept(rng):
    stack = full_stack(rng)
    arrays = {i: stack.band(i).values.copy() for i in range(1, 37)}
    arrays[30][0, 0] = np.nan
    m = flatten_stack(stack_from_arrays(GEOM, arrays))
    assert m.nodata_mask[0, 29] and m.nodata_mask.sum() == 1


def test_binary_round_trip(tmp_path, rng):
    X = rng.normal(size=(25, 3)).astype(np.float32).astype(float)
    X[4, 1] = np.nan
    y = rng.normal(size=25).astype(np.float32).astype(float)
    idx = np.column_stack([np.arange(25), np.arange(25)[::-1], np.full(25, 2015)])
    m = FeatureMatrix(X, y, ("a", "b", "c"), "t", idx)
    write_matrix(m, tmp_path / "m.bin")
    back = read_matrix(tmp_path / "m.bin")
    assert np.array_equal(back.features, X, equal_nan=True)
    assert np.array_equal(back.target, y)
    assert np.array_equal(back.row_index, idx)
    assert back.feature_names == ("a", "b", "c") and back.target_name == "t"
    write_matrix(back, tmp_path / "m2.bin")
    assert (tmp_path / "m.bin").read_bytes() == (tmp_path / "m2.bin").read_bytes()


def test_empty_round_trip(tmp_path):
    m = FeatureMatrix(np.zeros((0, 2)), np.zeros(0), ("a", "b"))
    write_matrix(m, tmp_path / "e.bin")
    assert read_matrix(tmp_path / "e.bin").n_rows == 0


def test_bad_matrix_files(tmp_path):
    with pytest.raises(InputError, match="not found"):
        read_matrix(tmp_path / "none.bin")
    (tmp_path / "junk.bin").write_bytes(b"hello world, not a matrix at all")
    with pytest.raises(InputError):
        read_matrix(tmp_path / "junk.bin")
    m = FeatureMatrix(np.ones((3, 1)), np.ones(3), ("a",))
    write_matrix(m, tmp_path / "t.bin")
    raw = (tmp_path / "t.bin").read_bytes()
    (tmp_path / "t.bin").write_bytes(raw[:-2])
    with pytest.raises(InputError, match="size"):
        read_matrix(tmp_path / "t.bin")


def test_shape_validation():
    with pytest.raises(ValidationError):
        FeatureMatrix(np.zeros((3, 2)), np.zeros(2), ("a", "b"))
    with pytest.raises(ValidationError):
        FeatureMatrix(np.zeros((3, 2)), np.zeros(3), ("a",))


def test_concat_and_subset(rng):
    a = FeatureMatrix(rng.normal(size=(3, 2)), rng.normal(size=3), ("x", "y"))
    b = FeatureMatrix(rng.normal(size=(2, 2)), rng.normal(size=2), ("x", "y"))
    c = FeatureMatrix.concat([a, b])
    assert c.n_rows == 5
    assert np.array_equal(c.subset(slice(3, 5)).features, b.features)
    with pytest.raises(ValidationError):
        FeatureMatrix.concat([a, FeatureMatrix(np.zeros((1, 2)), np.zeros(1), ("x", "z"))])
