"""Utility-model instance generators driven by a geographic dataset.

Four housing-style models (distance, shared-per-type distance, project
approval, price) and a school-choice variant with tier-based locations and
top-20 truncation.  Generation is a pure function of (dataset, config), so
identical inputs give bit-identical instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geodata import (
    DEGREE_KM_DEFAULT,
    GeoDataset,
    composition_for,
    km_distance,
    sample_points,
    sampling_polygon,
)
from .model import Instance, InputError, QuotaProfile

MODELS = ("dist", "ethn", "proj", "price", "chicago")
MIN_DISTANCE_KM = 0.001          # 1 m floor when a location hits a block exactly
PRICE_DENOM_FLOOR = 1e-6         # keeps the inverse-square utility finite
CHICAGO_ALPHA = 0.25
CHICAGO_TOP_BLOCKS = 20


@dataclass(frozen=True)
class ModelConfig:
    model: str
    n: int
    seed: int
    sigma2: Optional[float] = None
    rho_km: Optional[float] = None
    degree_km: float = DEGREE_KM_DEFAULT
    noise: str = "per-item"      # or "per-block": one draw per (agent, block)

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise InputError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.n < 1:
            raise InputError("agent count must be positive")
        if self.noise not in ("per-item", "per-block"):
            raise InputError(f"unknown noise mode {self.noise!r}")
        needs_sigma = self.model in ("dist", "ethn", "price", "chicago")
        if needs_sigma:
            if self.sigma2 is None or self.sigma2 < 0:
                raise InputError(f"model {self.model!r} requires sigma2 >= 0")
            if self.rho_km is not None:
                raise InputError(f"model {self.model!r} does not take a radius")
        else:
            if self.rho_km is None or self.rho_km <= 0:
                raise InputError("model 'proj' requires a positive radius rho_km")
            if self.sigma2 is not None:
                raise InputError("model 'proj' does not take sigma2")


def generate(dataset: GeoDataset, cfg: ModelConfig) -> Instance:
    if cfg.model == "dist":
        return gen_dist(dataset, cfg)
    if cfg.model == "ethn":
        return gen_ethn(dataset, cfg)
    if cfg.model == "proj":
        return gen_proj(dataset, cfg)
    if cfg.model == "price":
        return gen_price(dataset, cfg)
    return gen_chicago(dataset, cfg)


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------

def _quota_profile(dataset: GeoDataset, k: int, l: int) -> QuotaProfile:
    if dataset.quotas is None:
        raise InputError("dataset has no quotas.csv; cannot derive capacities")
    return QuotaProfile(np.tile(dataset.quotas[:, None], (1, l)), rounding="floor")


def _block_distances(points: np.ndarray, dataset: GeoDataset, degree_km: float) -> np.ndarray:
    """(rows, blocks) planar km distances, floored at 1 m."""
    coords = dataset.block_coords
    d = km_distance(points[:, 0][:, None], points[:, 1][:, None],
                    coords[None, :, 0], coords[None, :, 1], degree_km)
    return np.maximum(d, MIN_DISTANCE_KM)


def _noisy_inverse_distance(block_means: np.ndarray, dataset: GeoDataset,
                            cfg: ModelConfig, rng: np.random.Generator) -> np.ndarray:
    """Raw utilities: normal noise around inverse distance, clamped at zero."""
    block_of = np.repeat(np.arange(len(dataset.blocks)), dataset.block_sizes)
    if cfg.sigma2 == 0:
        raw = block_means[:, block_of].copy()
    elif cfg.noise == "per-block":
        noisy = rng.normal(block_means, np.sqrt(cfg.sigma2))
        raw = noisy[:, block_of]
    else:
        raw = rng.normal(block_means[:, block_of], np.sqrt(cfg.sigma2))
    return np.clip(raw, 0.0, None)


def _normalize_rows(raw: np.ndarray) -> np.ndarray:
    """Rows rescaled to sum to one; an all-zero row becomes uniform."""
    raw = raw.copy()
    sums = raw.sum(axis=1)
    raw[sums <= 0] = 1.0
    return raw / raw.sum(axis=1, keepdims=True)


def _build(dataset: GeoDataset, cfg: ModelConfig, utilities: np.ndarray,
           caps_profile: QuotaProfile, metadata: dict) -> Instance:
    sizes = dataset.block_sizes
    type_sizes = composition_for(dataset, cfg.n)
    return Instance(
        type_sizes=type_sizes,
        block_sizes=sizes,
        utilities=utilities,
        capacities=caps_profile.capacities_for(sizes),
        quotas=caps_profile,
        type_names=tuple(t.name for t in dataset.types),
        block_names=tuple(b.name for b in dataset.blocks),
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

def gen_dist(dataset: GeoDataset, cfg: ModelConfig) -> Instance:
    """Each agent prefers a uniformly sampled point; item utilities are noisy
    inverse distances to the item's block, renormalized per agent."""
    rng = np.random.default_rng(cfg.seed)
    polygon = sampling_polygon(dataset, cfg.degree_km)
    points = sample_points(polygon, cfg.n, rng)
    means = 1.0 / _block_distances(points, dataset, cfg.degree_km)
    utilities = _normalize_rows(_noisy_inverse_distance(means, dataset, cfg, rng))
    profile = _quota_profile(dataset, len(dataset.types), len(dataset.blocks))
    meta = {"model": "dist", "sigma2": cfg.sigma2, "seed": cfg.seed}
    return _build(dataset, cfg, utilities, profile, meta)


def gen_ethn(dataset: GeoDataset, cfg: ModelConfig) -> Instance:
    """Like the distance model but all agents of a type share one preferred
    point, so the noiseless case is exactly type-uniform."""
    rng = np.random.default_rng(cfg.seed)
    polygon = sampling_polygon(dataset, cfg.degree_km)
    type_points = sample_points(polygon, len(dataset.types), rng)
    type_means = 1.0 / _block_distances(type_points, dataset, cfg.degree_km)
    type_sizes = composition_for(dataset, cfg.n)
    means = np.repeat(type_means, type_sizes, axis=0)
    utilities = _normalize_rows(_noisy_inverse_distance(means, dataset, cfg, rng))
    profile = _quota_profile(dataset, len(dataset.types), len(dataset.blocks))
    meta = {"model": "ethn", "sigma2": cfg.sigma2, "seed": cfg.seed}
    return _build(dataset, cfg, utilities, profile, meta)


def gen_proj(dataset: GeoDataset, cfg: ModelConfig) -> Instance:
    """Binary approval: an agent approves every item of each block within the
    radius of her sampled home region, making the instance block-uniform."""
    if not dataset.regions:
        raise InputError("dataset has no regions.csv; the approval model needs regions")
    rng = np.random.default_rng(cfg.seed)
    type_sizes = composition_for(dataset, cfg.n)
    region_pops = np.array([r.populations for r in dataset.regions])  # (R, k)
    region_coords = np.array([[r.lat, r.lon] for r in dataset.regions])
    region_of_agent = np.empty(cfg.n, dtype=int)
    start = 0
    for p, count in enumerate(type_sizes):
        weights = region_pops[:, p]
        total = weights.sum()
        if total <= 0:
            raise InputError(f"type {dataset.types[p].name!r} has zero population "
                             f"in every region")
        region_of_agent[start:start + count] = rng.choice(
            len(dataset.regions), size=count, p=weights / total)
        start += count
    d = _block_distances(region_coords[region_of_agent], dataset, cfg.degree_km)
    approves = d <= cfg.rho_km                       # (n, blocks)
    block_of = np.repeat(np.arange(len(dataset.blocks)), dataset.block_sizes)
    utilities = approves[:, block_of].astype(float)
    profile = _quota_profile(dataset, len(dataset.types), len(dataset.blocks))
    meta = {"model": "proj", "rho_km": cfg.rho_km, "seed": cfg.seed}
    return _build(dataset, cfg, utilities, profile, meta)


def gen_price(dataset: GeoDataset, cfg: ModelConfig) -> Instance:
    """Inverse squared gap between an item's price and a third of the agent's
    salary; salaries are normal per type, prices uniform in per-category
    bounds, categories cycling through each block's items."""
    if not dataset.price_bounds:
        raise InputError("dataset has no prices.csv; the price model needs bounds")
    rng = np.random.default_rng(cfg.seed)
    type_sizes = composition_for(dataset, cfg.n)
    if cfg.sigma2 == 0:
        salaries = np.repeat(dataset.salaries, type_sizes)
    else:
        salaries = rng.normal(np.repeat(dataset.salaries, type_sizes), np.sqrt(cfg.sigma2))
    lb = np.empty(sum(dataset.block_sizes))
    ub = np.empty_like(lb)
    pos = 0
    for block in dataset.blocks:
        for slot in range(block.size):
            category = dataset.categories[slot % len(dataset.categories)]
            try:
                lo, hi = dataset.price_bounds[(category, block.name)]
            except KeyError:
                raise InputError(f"no price bounds for category {category!r} in "
                                 f"block {block.name!r}") from None
            lb[pos], ub[pos] = lo, hi
            pos += 1
    prices = rng.uniform(lb, ub)
    gap = prices[None, :] - salaries[:, None] / 3.0
    gap = np.where(np.abs(gap) < PRICE_DENOM_FLOOR, PRICE_DENOM_FLOOR, gap)
    utilities = 1.0 / gap**2
    profile = _quota_profile(dataset, len(dataset.types), len(dataset.blocks))
    meta = {"model": "price", "sigma2": cfg.sigma2, "seed": cfg.seed,
            "salaries": dataset.salaries.tolist()}
    return _build(dataset, cfg, utilities, profile, meta)


def gen_chicago(dataset: GeoDataset, cfg: ModelConfig) -> Instance:
    """Distance model with tier-conditional home locations (uniform over the
    tier's tract centroids) and per-agent truncation to the 20 best blocks."""
    if not dataset.tracts:
        raise InputError("dataset has no tracts.csv; the school model needs tracts")
    rng = np.random.default_rng(cfg.seed)
    type_sizes = composition_for(dataset, cfg.n)
    tier_coords = []
    for p in range(len(dataset.types)):
        coords = np.array([[t.lat, t.lon] for t in dataset.tracts if t.tier == p + 1])
        if type_sizes[p] > 0 and coords.size == 0:
            raise InputError(f"no tracts for tier {p + 1}")
        tier_coords.append(coords)
    points = np.empty((cfg.n, 2))
    start = 0
    for p, count in enumerate(type_sizes):
        if count:
            picks = rng.integers(len(tier_coords[p]), size=count)
            points[start:start + count] = tier_coords[p][picks]
        start += count
    means = 1.0 / _block_distances(points, dataset, cfg.degree_km)
    utilities = _normalize_rows(_noisy_inverse_distance(means, dataset, cfg, rng))

    l = len(dataset.blocks)
    sizes = np.asarray(dataset.block_sizes)
    block_of = np.repeat(np.arange(l), sizes)
    if l > CHICAGO_TOP_BLOCKS:
        # rank blocks by the agent's mean item utility, ties by block index
        sums = np.zeros((cfg.n, l))
        np.add.at(sums.T, block_of, utilities.T)
        block_means = sums / sizes[None, :]
        ranking = np.argsort(-block_means, axis=1, kind="stable")
        keep_blocks = ranking[:, :CHICAGO_TOP_BLOCKS]
        keep = np.zeros((cfg.n, l), dtype=bool)
        np.put_along_axis(keep, keep_blocks, True, axis=1)
        utilities = np.where(keep[:, block_of], utilities, 0.0)
        row_sums = utilities.sum(axis=1, keepdims=True)
        # degenerate rows fall back to uniform over the kept blocks only
        fallback = keep[:, block_of].astype(float)
        fallback /= fallback.sum(axis=1, keepdims=True)
        utilities = np.where(row_sums > 0, utilities / np.where(row_sums > 0, row_sums, 1.0),
                             fallback)
    alphas = np.full((len(dataset.types), l), CHICAGO_ALPHA)
    profile = QuotaProfile(alphas, rounding="floor")
    meta = {"model": "chicago", "sigma2": cfg.sigma2, "seed": cfg.seed}
    return _build(dataset, cfg, utilities, profile, meta)
