"""Flattened pixel rows (35 features + dNBR target) and their binary file.

File layout, little-endian::

    magic      8 bytes   b"FSMATRX\\0"
    version    uint32    1
    n_rows     uint64
    n_cols     uint32    feature columns + 1 (target last)
    names_len  uint32    byte length of the names block
    names      utf-8, column names joined by "\\n"
    index      int32[n_rows, 3]   (pixel row, pixel col, year)
    body       float32[n_rows, n_cols] row-major, NaN = nodata
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ValidationError
from .ingest import BandStack
from .schema import SCHEMA, TARGET_INDEX

MAGIC = b"FSMATRX\0"
VERSION = 1
_HEAD = struct.Struct("<8sIQII")


@dataclass(frozen=True)
class FeatureMatrix:
    features: np.ndarray  # (n, k)
    target: np.ndarray  # (n,)
    feature_names: tuple[str, ...]
    target_name: str = "dNBR"
    row_index: np.ndarray | None = None  # (n, 3) pixel row, pixel col, year

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.target, dtype=np.float64)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ValidationError(f"matrix shapes disagree: X {X.shape}, y {y.shape}")
        if X.shape[1] != len(self.feature_names):
            raise ValidationError("feature name count does not match column count")
        idx = self.row_index
        if idx is None:
            idx = np.zeros((X.shape[0], 3), dtype=np.int32)
            idx[:, 0] = np.arange(X.shape[0])
        idx = np.asarray(idx, dtype=np.int32).reshape(X.shape[0], 3)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "target", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "row_index", idx)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def nodata_mask(self) -> np.ndarray:
        return np.isnan(np.column_stack([self.features, self.target]))

    def subset(self, rows) -> "FeatureMatrix":
        return FeatureMatrix(
            self.features[rows], self.target[rows], self.feature_names,
            self.target_name, self.row_index[rows],
        )

    def with_features(self, X: np.ndarray) -> "FeatureMatrix":
        return FeatureMatrix(X, self.target, self.feature_names, self.target_name, self.row_index)

    def column(self, name: str) -> np.ndarray:
        return self.features[:, self.feature_names.index(name)]

    @classmethod
    def concat(cls, parts: list["FeatureMatrix"]) -> "FeatureMatrix":
        if not parts:
            raise ValidationError("nothing to concatenate")
        names = parts[0].feature_names
        if any(p.feature_names != names for p in parts):
            raise ValidationError("cannot concatenate matrices with different columns")
        return cls(
            np.vstack([p.features for p in parts]),
            np.concatenate([p.target for p in parts]),
            names,
            parts[0].target_name,
            np.vstack([p.row_index for p in parts]),
        )


def flatten_stack(stack: BandStack, year: int = 0) -> FeatureMatrix:
    """Rows for every pixel whose target (band 36) is valid, in raster order.

    Feature nodata is kept as NaN; imputation happens downstream.
    """
    arr = stack.to_array()
    target = arr[TARGET_INDEX - 1]
    rr, cc = np.nonzero(~np.isnan(target))
    feats = arr[: TARGET_INDEX - 1, rr, cc].T
    idx = np.column_stack([rr, cc, np.full(rr.shape, year)]).astype(np.int32)
    return FeatureMatrix(
        feats.reshape(len(rr), TARGET_INDEX - 1), target[rr, cc],
        tuple(SCHEMA.names[: TARGET_INDEX - 1]), SCHEMA[TARGET_INDEX].name, idx,
    )


def write_matrix(m: FeatureMatrix, path: str | os.PathLike) -> None:
    names = "\n".join(m.feature_names + (m.target_name,)).encode("utf-8")
    body = np.column_stack([m.features, m.target]).astype("<f4")
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, VERSION, m.n_rows, m.n_features + 1, len(names)))
        fh.write(names)
        fh.write(m.row_index.astype("<i4").tobytes())
        fh.write(body.tobytes())


def read_matrix(path: str | os.PathLike) -> FeatureMatrix:
    p = os.fspath(path)
    if not os.path.isfile(p):
        raise InputError(f"matrix file not found: {p}")
    with open(p, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEAD.size:
        raise InputError(f"{p}: truncated matrix header")
    magic, version, n, k, nlen = _HEAD.unpack_from(raw)
    if magic != MAGIC:
        raise InputError(f"{p}: not a feature matrix file")
    if version != VERSION:
        raise InputError(f"{p}: unsupported matrix version {version}")
    off = _HEAD.size
    names = raw[off: off + nlen].decode("utf-8").split("\n")
    off += nlen
    expected = off + n * 3 * 4 + n * k * 4
    if len(names) != k or len(raw) != expected:
        raise InputError(f"{p}: matrix body size does not match header")
    idx = np.frombuffer(raw, dtype="<i4", count=n * 3, offset=off).reshape(n, 3)
    off += n * 3 * 4
    body = np.frombuffer(raw, dtype="<f4", count=n * k, offset=off).reshape(n, k)
    body = body.astype(np.float64)
    return FeatureMatrix(body[:, :-1], body[:, -1], tuple(names[:-1]), names[-1], idx.copy())
