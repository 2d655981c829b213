"""The canonical 36-band layout shared by every stack and feature matrix."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

LANDSAT = "Landsat"
DERIVED = "Derived"
TERRAIN = "Terrain"
CLIMATE = "Climate"


@dataclass(frozen=True)
class BandEntry:
    index: int
    name: str
    source: str
    fill_if_missing: float = 0.0


_NAMES = [
    ("SR_B1", LANDSAT),
    ("SR_B2", LANDSAT),
    ("SR_B3", LANDSAT),
    ("SR_B4", LANDSAT),
    ("SR_B5", LANDSAT),
    ("SR_B6", LANDSAT),
    ("SR_B7", LANDSAT),
    ("SR_QA_AEROSOL", LANDSAT),
    ("SR_ATMOS_OPACITY", LANDSAT),
    ("SR_CLOUD_QA", LANDSAT),
    ("ST_B6", LANDSAT),
    ("ST_B10", LANDSAT),
    ("ST_ATRAN", LANDSAT),
    ("ST_CDIST", LANDSAT),
    ("ST_DRAD", LANDSAT),
    ("ST_EMIS", LANDSAT),
    ("ST_EMSD", LANDSAT),
    ("ST_QA", LANDSAT),
    ("ST_TRAD", LANDSAT),
    ("ST_URAD", LANDSAT),
    ("QA_PIXEL", LANDSAT),
    ("QA_RADSAT", LANDSAT),
    ("NDVI", DERIVED),
    ("NBR", DERIVED),
    ("EVI", DERIVED),
    ("NDWI", DERIVED),
    ("BI", DERIVED),
    ("SWIR1", DERIVED),
    ("SWIR2", DERIVED),
    ("Elevation", TERRAIN),
    ("Slope", TERRAIN),
    ("TPI", TERRAIN),
    ("Mean_Temperature", CLIMATE),
    ("Total_Precipitation", CLIMATE),
    ("SMI", CLIMATE),
    ("dNBR", DERIVED),
]


class BandSchema:
    """Ordered, immutable list of the 36 schema bands (1-based indices)."""

    def __init__(self, entries: list[BandEntry]):
        indices = [e.index for e in entries]
        if indices != list(range(1, len(entries) + 1)):
            raise ValueError("band indices must run 1..N without gaps")
        self._entries = tuple(entries)
        self._by_name = {e.name.upper(): e for e in entries}

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[BandEntry]:
        return iter(self._entries)

    def __getitem__(self, index: int) -> BandEntry:
        return self._entries[index - 1]

    @property
    def names(self) -> list[str]:
        return [e.name for e in self._entries]

    def index_of(self, name: str) -> int:
        try:
            return self._by_name[name.strip().upper()].index
        except KeyError:
            raise KeyError(f"unknown band name: {name!r}") from None

    def has(self, name: str) -> bool:
        return name.strip().upper() in self._by_name


SCHEMA = BandSchema([BandEntry(i + 1, n, s) for i, (n, s) in enumerate(_NAMES)])

N_BANDS = 36
TARGET_INDEX = 36
LANDSAT_INDICES = tuple(range(1, 23))
INDEX_BANDS = tuple(range(23, 30))
FEATURE_NAMES = SCHEMA.names[:35]
