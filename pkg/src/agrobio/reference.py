"""Historical reference series: parsing, validation and interpolation.

A reference directory holds five comma-separated files (``#`` lines are
comments; a ``# provenance:`` line is kept as the series' provenance tag)::

    biodiversity.csv   year,value
    pesticide.csv      year,kg_per_ha
    price_index.csv    year,index
    yield.csv          year,t_per_ha
    structural.csv     year,size_class_low_ha,size_class_high_ha,farm_count,total_land_ha
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .core import SIZE_CLASS_EDGES, SizeClass

FILES = {
    "biodiversity": ("biodiversity.csv", ("year", "value")),
    "pesticide": ("pesticide.csv", ("year", "kg_per_ha")),
    "price_index": ("price_index.csv", ("year", "index")),
    "yield": ("yield.csv", ("year", "t_per_ha")),
    "structural": ("structural.csv", ("year", "size_class_low_ha", "size_class_high_ha",
                                      "farm_count", "total_land_ha")),
}

# observed series name -> simulated frame field it is compared with
SERIES_TO_FRAME = {
    "biodiversity": "eps",
    "pesticide": "weighted_pesticide_mean",
    "price_index": "price",
    "yield": "mean_yield",
    "farmer_count": "n_active",
    "land_small": "land_small",
    "land_medium": "land_medium",
    "land_large": "land_large",
    "farm_size": "mean_farm_size",
}


class ReferenceDataError(ValueError):
    """A reference file is missing or malformed; the message names file and line."""


@dataclass
class Series:
    years: np.ndarray
    values: np.ndarray
    provenance: str = ""

    def __len__(self):
        return self.years.size


@dataclass
class ReferenceSeries:
    series: dict[str, Series] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Series:
        return self.series[name]

    def names(self) -> list[str]:
        return sorted(self.series)

    def restrict(self, first: int, last: int) -> "ReferenceSeries":
        out = {}
        for name, s in self.series.items():
            keep = (s.years >= first) & (s.years <= last)
            out[name] = Series(s.years[keep], s.values[keep], s.provenance)
        return ReferenceSeries(out)


def _read_rows(path: Path, columns: tuple[str, ...]):
    if not path.is_file():
        raise ReferenceDataError(f"{path}: file not found")
    provenance = ""
    rows = []
    header = None
    with path.open(newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                text = line.lstrip("#").strip()
                if text.lower().startswith("provenance:"):
                    provenance = text.split(":", 1)[1].strip()
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = tuple(c.strip() for c in cells)
                if header != columns:
                    raise ReferenceDataError(f"{path}:{lineno}: expected columns {','.join(columns)}, got {line}")
                continue
            if len(cells) != len(columns):
                raise ReferenceDataError(f"{path}:{lineno}: expected {len(columns)} fields, got {len(cells)}")
            try:
                values = [float(c) for c in cells]
            except ValueError:
                raise ReferenceDataError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
            if any(v < 0 for v in values[1:]) or not all(np.isfinite(values)):
                raise ReferenceDataError(f"{path}:{lineno}: negative or non-finite value in {line!r}")
            rows.append((lineno, values))
    if header is None or not rows:
        raise ReferenceDataError(f"{path}: no data rows")
    return rows, provenance


def _simple_series(path: Path, columns) -> Series:
    rows, provenance = _read_rows(path, columns)
    years = []
    for lineno, (year, value) in rows:
        if value <= 0:
            raise ReferenceDataError(f"{path}:{lineno}: value must be positive")
        if years and year <= years[-1]:
            raise ReferenceDataError(f"{path}:{lineno}: years must be strictly increasing")
        years.append(year)
    return Series(np.array(years, dtype=int), np.array([r[1][1] for r in rows]), provenance)


def interpolate_structural(years, values, first: int | None = None, last: int | None = None) -> Series:
    """Linear interpolation onto every calendar year between the observations.

    No extrapolation: the output spans ``[max(first, y0), min(last, yN)]``.
    """
    years = np.asarray(years, dtype=float)
    values = np.asarray(values, dtype=float)
    if years.size < 2:
        raise ValueError("interpolation needs at least two observations")
    if np.any(np.diff(years) <= 0):
        raise ValueError("observation years must be strictly increasing")
    lo = int(np.ceil(years[0])) if first is None else max(int(first), int(np.ceil(years[0])))
    hi = int(np.floor(years[-1])) if last is None else min(int(last), int(np.floor(years[-1])))
    grid = np.arange(lo, hi + 1)
    return Series(grid, np.interp(grid, years, values))


@dataclass
class Census:
    years: np.ndarray
    classes: dict[int, list[SizeClass]]
    provenance: str = ""

    def histogram(self, year: int) -> list[SizeClass]:
        return self.classes[year]


def _census(path: Path) -> Census:
    rows, provenance = _read_rows(path, FILES["structural"][1])
    classes: dict[int, list[SizeClass]] = {}
    last_year = None
    for lineno, (year, low, high, count, land) in rows:
        year = int(year)
        if last_year is not None and year < last_year:
            raise ReferenceDataError(f"{path}:{lineno}: years must be non-decreasing")
        if not 0 < low < high:
            raise ReferenceDataError(f"{path}:{lineno}: size class bounds must satisfy 0 < low < high")
        last_year = year
        classes.setdefault(year, []).append(SizeClass(low, high, count, land))
    return Census(np.array(sorted(classes)), classes, provenance)


def structural_series(census: Census) -> dict[str, Series]:
    """Farmer count, land per size class and mean farm size at each census year."""
    small, large = SIZE_CLASS_EDGES
    out = {k: [] for k in ("farmer_count", "land_small", "land_medium", "land_large", "farm_size")}
    for year in census.years:
        cls = census.classes[int(year)]
        count = sum(c.count for c in cls)
        land = sum(c.total_land for c in cls)
        out["farmer_count"].append(count)
        out["land_small"].append(sum(c.total_land for c in cls if c.high <= small))
        out["land_medium"].append(sum(c.total_land for c in cls if c.low >= small and c.high <= large))
        out["land_large"].append(sum(c.total_land for c in cls if c.low >= large))
        out["farm_size"].append(land / count)
    return {k: Series(census.years.copy(), np.array(v, dtype=float), census.provenance) for k, v in out.items()}


def load_reference_data(directory, first: int = 1990, last: int = 2021) -> tuple[ReferenceSeries, list[SizeClass]]:
    """Parse a reference directory.

    Returns the dense yearly series over ``[first, last]`` (structural data
    linearly interpolated between census years) and the size histogram of
    the earliest census.
    """
    directory = Path(directory)
    series = {}
    for name in ("biodiversity", "pesticide", "price_index", "yield"):
        fname, cols = FILES[name]
        series[name] = _simple_series(directory / FILES[name][0], cols)
    census = _census(directory / FILES["structural"][0])
    for name, s in structural_series(census).items():
        dense = interpolate_structural(s.years, s.values, first, last)
        dense.provenance = s.provenance
        series[name] = dense
    ref = ReferenceSeries(series).restrict(first, last)
    return ref, census.histogram(int(census.years[0]))


def default_reference_dir() -> Path:
    return Path(str(resources.files("agrobio") / "data" / "reference"))


def default_size_histogram() -> list[SizeClass]:
    census = _census(default_reference_dir() / FILES["structural"][0])
    return census.histogram(int(census.years[0]))
