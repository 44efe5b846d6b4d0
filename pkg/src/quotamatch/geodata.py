"""Geographic dataset ingestion for the instance generators.

A dataset directory holds CSV files (UTF-8, header row required):

* ``blocks.csv``: name,size,lat,lon — developments/schools with item counts.
* ``types.csv``: name,proportion,salary — agent groups.
* ``quotas.csv``: type,alpha — per-type fractional cap, uniform across blocks
  (optional; generators that need caps require it unless they fix their own).
* ``regions.csv``: name,lat,lon,pop_type1..pop_typek (optional).
* ``prices.csv``: category,block,lb,ub (optional).
* ``tracts.csv``: tract_id,tier,lat,lon (optional).
* ``compositions.csv``: n,count1..countk (optional) — exact type counts for
  special population sizes; other sizes use largest-remainder apportionment.
* ``polygon.csv``: lat,lon (optional) — vertices of the sampling region; when
  absent the convex hull of the block locations, widened by 5 km, is used.

Distances are planar: both latitude and longitude degrees are scaled by a
constant km-per-degree factor, adequate at city scale.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, replace
from importlib import resources
from typing import Optional, Sequence

import numpy as np
import shapely
from shapely.geometry import MultiPoint, Polygon

from .model import InputError

DEGREE_KM_DEFAULT = 111.0
POLYGON_MARGIN_KM = 5.0


@dataclass(frozen=True)
class BlockInfo:
    name: str
    size: int
    lat: float
    lon: float


@dataclass(frozen=True)
class TypeInfo:
    name: str
    proportion: float
    salary: float


@dataclass(frozen=True)
class RegionInfo:
    name: str
    lat: float
    lon: float
    populations: tuple[float, ...]


@dataclass(frozen=True)
class TractInfo:
    tract_id: str
    tier: int
    lat: float
    lon: float


@dataclass(frozen=True)
class GeoDataset:
    blocks: tuple[BlockInfo, ...]
    types: tuple[TypeInfo, ...]
    quotas: Optional[np.ndarray]                     # per-type alpha, or None
    regions: tuple[RegionInfo, ...]
    price_bounds: dict[tuple[str, str], tuple[float, float]]
    categories: tuple[str, ...]                      # price categories, file order
    tracts: tuple[TractInfo, ...]
    compositions: dict[int, tuple[int, ...]]
    polygon: Optional[tuple[tuple[float, float], ...]]

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(b.size for b in self.blocks)

    @property
    def block_coords(self) -> np.ndarray:
        return np.array([[b.lat, b.lon] for b in self.blocks])

    @property
    def proportions(self) -> np.ndarray:
        return np.array([t.proportion for t in self.types])

    @property
    def salaries(self) -> np.ndarray:
        return np.array([t.salary for t in self.types])


def km_distance(lat1, lon1, lat2, lon2, degree_km: float = DEGREE_KM_DEFAULT):
    """Planar distance in km treating one degree as a fixed km length."""
    return degree_km * np.hypot(np.asarray(lat1) - np.asarray(lat2),
                                np.asarray(lon1) - np.asarray(lon2))


def _read_rows(path: str, required: Sequence[str]) -> list[dict[str, str]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise InputError(f"{path}: missing header row")
            missing = [c for c in required if c not in reader.fieldnames]
            if missing:
                raise InputError(f"{path}: missing columns {missing}")
            return list(reader)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _parse(path: str, row_no: int, row: dict[str, str], column: str, kind=float):
    raw = row.get(column)
    if raw is None or raw.strip() == "":
        raise InputError(f"{path} row {row_no}: empty value in column {column!r}")
    try:
        return kind(raw)
    except ValueError as exc:
        raise InputError(f"{path} row {row_no}: bad value {raw!r} in column {column!r}") from exc


def resolve_data_dir(spec: str) -> str:
    """Interpret a --data argument: a directory path, or a bundled name."""
    if os.path.isdir(spec):
        return spec
    bundled = resources.files("quotamatch").joinpath("data").joinpath(spec)
    if bundled.is_dir():
        return str(bundled)
    raise InputError(f"data directory {spec!r} not found (and no bundled dataset by that name)")


def load_geodata(path: str) -> GeoDataset:
    """Load and validate a dataset directory; optional files may be absent."""
    path = resolve_data_dir(path)
    blocks_path = os.path.join(path, "blocks.csv")
    types_path = os.path.join(path, "types.csv")
    blocks = []
    for idx, row in enumerate(_read_rows(blocks_path, ["name", "size", "lat", "lon"]), start=2):
        size = _parse(blocks_path, idx, row, "size", int)
        if size <= 0:
            raise InputError(f"{blocks_path} row {idx}: block size must be positive")
        blocks.append(BlockInfo(row["name"], size,
                                _parse(blocks_path, idx, row, "lat"),
                                _parse(blocks_path, idx, row, "lon")))
    if not blocks:
        raise InputError(f"{blocks_path}: no blocks defined")

    types = []
    for idx, row in enumerate(_read_rows(types_path, ["name", "proportion", "salary"]), start=2):
        types.append(TypeInfo(row["name"],
                              _parse(types_path, idx, row, "proportion"),
                              _parse(types_path, idx, row, "salary")))
    if not types:
        raise InputError(f"{types_path}: no types defined")
    total = sum(t.proportion for t in types)
    if abs(total - 1.0) > 1e-9:
        raise InputError(f"{types_path}: proportions sum to {total}, expected 1")

    quotas = None
    quotas_path = os.path.join(path, "quotas.csv")
    if os.path.exists(quotas_path):
        by_name = {}
        for idx, row in enumerate(_read_rows(quotas_path, ["type", "alpha"]), start=2):
            alpha = _parse(quotas_path, idx, row, "alpha")
            if not (0 < alpha <= 1):
                raise InputError(f"{quotas_path} row {idx}: alpha must be in (0, 1]")
            by_name[row["type"]] = alpha
        try:
            quotas = np.array([by_name[t.name] for t in types])
        except KeyError as exc:
            raise InputError(f"{quotas_path}: no quota for type {exc}") from exc

    regions = []
    regions_path = os.path.join(path, "regions.csv")
    if os.path.exists(regions_path):
        pop_cols = [f"pop_type{p + 1}" for p in range(len(types))]
        for idx, row in enumerate(_read_rows(regions_path, ["name", "lat", "lon"] + pop_cols),
                                  start=2):
            pops = tuple(_parse(regions_path, idx, row, c) for c in pop_cols)
            if any(p < 0 for p in pops):
                raise InputError(f"{regions_path} row {idx}: negative population")
            regions.append(RegionInfo(row["name"],
                                      _parse(regions_path, idx, row, "lat"),
                                      _parse(regions_path, idx, row, "lon"),
                                      pops))

    price_bounds: dict[tuple[str, str], tuple[float, float]] = {}
    categories: list[str] = []
    prices_path = os.path.join(path, "prices.csv")
    if os.path.exists(prices_path):
        block_names = {b.name for b in blocks}
        for idx, row in enumerate(_read_rows(prices_path, ["category", "block", "lb", "ub"]),
                                  start=2):
            lb = _parse(prices_path, idx, row, "lb")
            ub = _parse(prices_path, idx, row, "ub")
            if lb > ub:
                raise InputError(f"{prices_path} row {idx}: lb {lb} exceeds ub {ub}")
            if row["block"] not in block_names:
                raise InputError(f"{prices_path} row {idx}: unknown block {row['block']!r}")
            if row["category"] not in categories:
                categories.append(row["category"])
            price_bounds[(row["category"], row["block"])] = (lb, ub)

    tracts = []
    tracts_path = os.path.join(path, "tracts.csv")
    if os.path.exists(tracts_path):
        for idx, row in enumerate(_read_rows(tracts_path, ["tract_id", "tier", "lat", "lon"]),
                                  start=2):
            tier = _parse(tracts_path, idx, row, "tier", int)
            if not (1 <= tier <= len(types)):
                raise InputError(f"{tracts_path} row {idx}: tier {tier} out of range")
            tracts.append(TractInfo(row["tract_id"], tier,
                                    _parse(tracts_path, idx, row, "lat"),
                                    _parse(tracts_path, idx, row, "lon")))

    compositions: dict[int, tuple[int, ...]] = {}
    comp_path = os.path.join(path, "compositions.csv")
    if os.path.exists(comp_path):
        count_cols = [f"count{p + 1}" for p in range(len(types))]
        for idx, row in enumerate(_read_rows(comp_path, ["n"] + count_cols), start=2):
            n = _parse(comp_path, idx, row, "n", int)
            counts = tuple(_parse(comp_path, idx, row, c, int) for c in count_cols)
            if sum(counts) != n:
                raise InputError(f"{comp_path} row {idx}: counts sum to {sum(counts)}, not {n}")
            compositions[n] = counts

    polygon = None
    polygon_path = os.path.join(path, "polygon.csv")
    if os.path.exists(polygon_path):
        pts = []
        for idx, row in enumerate(_read_rows(polygon_path, ["lat", "lon"]), start=2):
            pts.append((_parse(polygon_path, idx, row, "lat"),
                        _parse(polygon_path, idx, row, "lon")))
        if len(pts) < 3:
            raise InputError(f"{polygon_path}: a polygon needs at least 3 vertices")
        polygon = tuple(pts)

    return GeoDataset(
        blocks=tuple(blocks),
        types=tuple(types),
        quotas=quotas,
        regions=tuple(regions),
        price_bounds=price_bounds,
        categories=tuple(categories),
        tracts=tuple(tracts),
        compositions=compositions,
        polygon=polygon,
    )


def scale_blocks(dataset: GeoDataset, factor: float) -> GeoDataset:
    """Shrink or grow every block size by a factor (rounded, at least 1)."""
    if factor <= 0:
        raise InputError("scale factor must be positive")
    scaled = tuple(replace(b, size=max(1, int(round(b.size * factor))))
                   for b in dataset.blocks)
    return replace(dataset, blocks=scaled)


def composition_for(dataset: GeoDataset, n: int) -> tuple[int, ...]:
    """Type counts for a population of n: an exact table entry when present,
    else largest-remainder apportionment of the proportions."""
    if n in dataset.compositions:
        return dataset.compositions[n]
    shares = dataset.proportions * n
    counts = np.floor(shares).astype(int)
    leftover = n - int(counts.sum())
    if leftover > 0:
        order = np.lexsort((np.arange(len(counts)), -(shares - counts)))
        for p in order[:leftover]:
            counts[p] += 1
    return tuple(int(c) for c in counts)


def sampling_polygon(dataset: GeoDataset, degree_km: float = DEGREE_KM_DEFAULT) -> Polygon:
    """Region for uniform location sampling: the configured polygon, or the
    blocks' convex hull widened by a fixed margin."""
    if dataset.polygon is not None:
        return Polygon([(lon, lat) for lat, lon in dataset.polygon])
    pts = MultiPoint([(b.lon, b.lat) for b in dataset.blocks])
    return pts.convex_hull.buffer(POLYGON_MARGIN_KM / degree_km)


def sample_points(polygon: Polygon, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points inside a polygon by rejection; returns (count, 2) lat/lon."""
    minx, miny, maxx, maxy = polygon.bounds
    out = np.empty((count, 2))
    filled = 0
    while filled < count:
        batch = max(64, 2 * (count - filled))
        xs = rng.uniform(minx, maxx, size=batch)
        ys = rng.uniform(miny, maxy, size=batch)
        keep = shapely.contains_xy(polygon, xs, ys)
        take = min(int(keep.sum()), count - filled)
        if take:
            sel_x = xs[keep][:take]
            sel_y = ys[keep][:take]
            out[filled:filled + take, 0] = sel_y  # lat
            out[filled:filled + take, 1] = sel_x  # lon
            filled += take
    return out
