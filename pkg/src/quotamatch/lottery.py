"""Serial lottery under type-block caps, plus Monte-Carlo aggregation.

Agents are drawn uniformly at random without replacement; each drawn agent
receives the highest-utility unassigned item among blocks whose cap for her
type is not yet filled (smallest item index on ties), or nothing when no
such item exists.

Randomness comes from a self-contained splitmix64 generator so that runs
are bit-identical across platforms and processes for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .model import Assignment, Instance, InputError, check_feasible, welfare

MASK64 = (1 << 64) - 1
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 finalizer (Steele, Lea & Flood constants)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Counter-based 64-bit generator: state advances by the golden-ratio
    increment and each output is the mixed state."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + SPLITMIX_GAMMA) & MASK64
        return _mix64(self._state)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased via rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = MASK64 + 1 - ((MASK64 + 1) % bound)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % bound


def derive_seed(master_seed: int, index: int) -> int:
    """Per-trial seed: mix of the master seed and the (offset) trial index."""
    return _mix64((master_seed + (index + 1) * SPLITMIX_GAMMA) & MASK64)


@dataclass(frozen=True)
class LotteryRun:
    seed: int
    assignment: Assignment
    welfare: float
    draw_order: tuple[int, ...]


@dataclass
class LotterySummary:
    trials: int
    mean_welfare: float
    std_welfare: float
    opt: Optional[float]
    ratio_of_means: Optional[float]   # opt over mean lottery welfare
    mean_ratio: Optional[float]       # mean of per-trial opt/welfare ratios
    std_ratio: Optional[float]
    records: list[dict]               # per-trial: trial, seed, welfare, ratio

    def to_json(self) -> dict[str, Any]:
        def enc(x):
            if x is None:
                return None
            return "inf" if math.isinf(x) else x
        return {
            "trials": self.trials,
            "mean_welfare": self.mean_welfare,
            "std_welfare": self.std_welfare,
            "opt": self.opt,
            "ratio_of_means": enc(self.ratio_of_means),
            "mean_ratio": enc(self.mean_ratio),
            "std_ratio": enc(self.std_ratio),
        }


def run_lottery(inst: Instance, seed: int) -> LotteryRun:
    """One deterministic lottery pass: n draws, each assigning at most one item."""
    rng = SplitMix64(seed)
    n, m = inst.n, inst.m
    u = inst.utilities
    caps = inst.capacities
    available = np.ones(m, dtype=bool)
    # item j currently open to type p iff block count is under the cap
    open_to_type = np.zeros((inst.k, m), dtype=bool)
    for p in range(inst.k):
        open_to_type[p] = caps[p, inst.block_of] > 0
    counts = np.zeros((inst.k, inst.l), dtype=np.int64)
    remaining = list(range(n))
    draw_order: list[int] = []
    pairs: list[tuple[int, int]] = []
    for _ in range(n):
        agent = remaining.pop(rng.randbelow(len(remaining)))
        draw_order.append(agent)
        p = int(inst.type_of[agent])
        mask = available & open_to_type[p]
        candidates = np.flatnonzero(mask)
        if candidates.size:
            j = int(candidates[np.argmax(u[agent, candidates])])
            pairs.append((agent, j))
            available[j] = False
            q = int(inst.block_of[j])
            counts[p, q] += 1
            if counts[p, q] >= caps[p, q]:
                rng_q = inst.block_range(q)
                open_to_type[p, rng_q.start:rng_q.stop] = False
    asg = Assignment(pairs)
    verdict = check_feasible(inst, asg)
    if not verdict.ok:  # quota bookkeeping guarantees this never triggers
        raise AssertionError(f"lottery produced infeasible assignment: "
                             f"{verdict.violation.describe()}")
    return LotteryRun(seed=seed, assignment=asg, welfare=welfare(inst, asg),
                      draw_order=tuple(draw_order))


def lottery_monte_carlo(
    inst: Instance,
    trials: int,
    master_seed: int,
    opt: Optional[float] = None,
    opt_c: Optional[float] = None,
) -> LotterySummary:
    """Aggregate repeated lotteries under derived per-trial seeds.

    Aggregation uses exact summation so results do not depend on execution
    order.  Both ratio conventions are reported: the ratio of the cap-free
    optimum to the mean lottery welfare, and the mean of per-trial ratios.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    welfares: list[float] = []
    records: list[dict] = []
    for t in range(trials):
        seed = derive_seed(master_seed, t)
        run = run_lottery(inst, seed)
        if opt_c is not None and run.welfare > opt_c + 1e-9 * max(1.0, opt_c):
            raise AssertionError(
                f"lottery welfare {run.welfare} exceeds constrained optimum {opt_c}")
        welfares.append(run.welfare)
        ratio = None
        if opt is not None:
            ratio = opt / run.welfare if run.welfare > 0 else (1.0 if opt <= 0 else math.inf)
        records.append({"trial": t, "seed": seed, "welfare": run.welfare, "ratio": ratio})
    mean = math.fsum(welfares) / trials
    var = math.fsum((w - mean) ** 2 for w in welfares) / (trials - 1) if trials > 1 else 0.0
    std = math.sqrt(max(var, 0.0))
    ratio_of_means = None
    mean_ratio = None
    std_ratio = None
    if opt is not None:
        ratio_of_means = opt / mean if mean > 0 else (1.0 if opt <= 0 else math.inf)
        ratios = [r["ratio"] for r in records]
        if any(math.isinf(r) for r in ratios):
            mean_ratio = math.inf
            std_ratio = math.inf
        else:
            mean_ratio = math.fsum(ratios) / trials
            rvar = (math.fsum((r - mean_ratio) ** 2 for r in ratios) / (trials - 1)
                    if trials > 1 else 0.0)
            std_ratio = math.sqrt(max(rvar, 0.0))
    return LotterySummary(
        trials=trials,
        mean_welfare=mean,
        std_welfare=std,
        opt=opt,
        ratio_of_means=ratio_of_means,
        mean_ratio=mean_ratio,
        std_ratio=std_ratio,
        records=records,
    )
