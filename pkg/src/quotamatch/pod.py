"""Price-of-diversity computation and its closed-form upper bounds.

The price of diversity is the ratio of the cap-free optimal welfare to the
cap-respecting optimum.  Two bounds are computed: one from the smallest
fractional cap alone, and one that additionally uses the inter-type
disparity of a cap-free optimal assignment.  Fractional caps come in two
flavors: the planner's nominal quotas, and the effective ratios of the
floored integer caps to block sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .model import (
    Assignment,
    DegenerateInputError,
    Instance,
    InputError,
    QuotaProfile,
    encode_extended,
    per_type_welfare,
)
from .solvers import EXACT_METHODS, SolveResult, solve, solve_unconstrained

INF = float("inf")


@dataclass
class PodReport:
    opt: float
    opt_c: float
    pod: float
    bound_thm4: float             # from nominal quotas when known, else effective
    bound_thm4_effective: float   # from floored integer caps
    beta: float
    beta_per_type: np.ndarray
    nu: np.ndarray
    bound_thm5: float
    bound_combined: float
    method: str
    mode: str                     # "nominal" | "effective"
    instance_hash: str
    xstar_hash: str

    def to_json(self) -> dict[str, Any]:
        return {
            "opt": self.opt,
            "opt_c": self.opt_c,
            "pod": encode_extended(self.pod),
            "bound_thm4": encode_extended(self.bound_thm4),
            "bound_thm4_effective": encode_extended(self.bound_thm4_effective),
            "beta": self.beta,
            "beta_per_type": [None if math.isnan(b) else b for b in self.beta_per_type],
            "nu": self.nu.tolist(),
            "bound_thm5": encode_extended(self.bound_thm5),
            "bound_combined": encode_extended(self.bound_combined),
            "method": self.method,
            "mode": self.mode,
            "instance_hash": self.instance_hash,
            "xstar_hash": self.xstar_hash,
        }


# ---------------------------------------------------------------------------
# Cap-ratio bounds
# ---------------------------------------------------------------------------

def nominal_cap_bound(alphas: np.ndarray) -> float:
    """Reciprocal of the smallest fractional quota."""
    alphas = np.asarray(alphas, dtype=float)
    smallest = float(alphas.min())
    return INF if smallest == 0 else 1.0 / smallest


def effective_quotas(inst: Instance) -> np.ndarray:
    """Integer cap over block size for each (type, block); NaN where the
    block is empty (an empty block constrains nothing)."""
    sizes = np.asarray(inst.block_sizes, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = inst.capacities / sizes[None, :]
    return ratios


def effective_cap_bound(inst: Instance) -> float:
    """Reciprocal of the smallest effective quota; +inf when some cap is 0."""
    ratios = effective_quotas(inst)
    finite = ratios[:, np.asarray(inst.block_sizes) > 0]
    if finite.size == 0:
        return INF
    smallest = float(np.nanmin(finite))
    return INF if smallest == 0 else 1.0 / smallest


def bound_thm4(inst: Instance, mode: str = "effective") -> float:
    """Utility-independent bound on the price of diversity.

    ``nominal`` mode uses the planner's quota profile (required); the
    ``effective`` mode uses the floored integer caps actually in force.
    """
    if mode == "nominal":
        if inst.quotas is None:
            raise InputError("nominal mode requires a quota profile on the instance")
        return nominal_cap_bound(inst.quotas.alphas)
    if mode == "effective":
        return effective_cap_bound(inst)
    raise InputError(f"unknown bound mode {mode!r}")


def min_alpha_per_type(inst: Instance, mode: str = "effective") -> np.ndarray:
    """Per-type minimum fractional cap across nonempty blocks."""
    if mode == "nominal":
        if inst.quotas is None:
            raise InputError("nominal mode requires a quota profile on the instance")
        alphas = inst.quotas.alphas
    else:
        alphas = effective_quotas(inst)
    nonemptyblocks = np.asarray(inst.block_sizes) > 0
    if not nonemptyblocks.any():
        return np.zeros(inst.k)
    return np.nanmin(alphas[:, nonemptyblocks], axis=1)


def disparity_beta(inst: Instance, x_star: Assignment) -> tuple[float, np.ndarray]:
    """Smallest ratio of a type's average utility to the population average
    under the given assignment, plus the full per-type vector.

    Only the matching constraints are checked; the caller is responsible for
    passing a cap-free optimal assignment.  Empty types get NaN and are
    excluded from the minimum.
    """
    verdict = check_feasible_matching_only(inst, x_star)
    if not verdict:
        raise InputError("assignment violates matching constraints")
    parts = per_type_welfare(inst, x_star)
    total = float(parts.sum())
    n = inst.n
    if total <= 0:
        raise DegenerateInputError("disparity is undefined at zero total welfare")
    sizes = np.asarray(inst.type_sizes, dtype=float)
    per_type = np.full(inst.k, np.nan)
    nonempty = sizes > 0
    per_type[nonempty] = (parts[nonempty] / sizes[nonempty]) / (total / n)
    beta = float(np.nanmin(per_type)) if nonempty.any() else 1.0
    return beta, per_type


def check_feasible_matching_only(inst: Instance, asg: Assignment) -> bool:
    seen_agents: set[int] = set()
    seen_items: set[int] = set()
    for i, j in asg.pairs:
        if not (0 <= i < inst.n and 0 <= j < inst.m):
            raise InputError(f"pair ({i}, {j}) out of range")
        if i in seen_agents or j in seen_items:
            return False
        seen_agents.add(i)
        seen_items.add(j)
    return True


def bound_thm5(beta: float, nu: np.ndarray, min_alphas: np.ndarray) -> float:
    """Disparity-aware bound: (1 / beta) over the nu-weighted sum of the
    per-type minimum quotas."""
    denom = float(np.dot(np.asarray(nu, dtype=float), np.asarray(min_alphas, dtype=float)))
    if denom <= 0 or beta <= 0:
        return INF
    return (1.0 / beta) / denom


# ---------------------------------------------------------------------------
# Full report
# ---------------------------------------------------------------------------

def compute_pod(
    inst: Instance,
    exact_method: str = "auto",
    mode: str = "effective",
    **solver_opts: Any,
) -> PodReport:
    """Solve both optimization problems and assemble the ratio and bounds.

    Conventions: both optima zero gives a ratio of 1; a positive cap-free
    optimum with a zero constrained optimum gives +inf.
    """
    if exact_method != "auto" and exact_method not in EXACT_METHODS:
        raise InputError(f"{exact_method!r} is not an exact solver; choose from "
                         f"{', '.join(EXACT_METHODS)} or 'auto'")
    relaxed = solve_unconstrained(inst)
    constrained = solve(inst, exact_method, **solver_opts)
    if not constrained.optimal:
        raise QuotamatchPodError(
            "constrained solve ended at a heuristic incumbent; the ratio needs "
            "a proven optimum")
    return assemble_report(inst, relaxed, constrained, mode)


class QuotamatchPodError(InputError):
    """The constrained solve did not certify optimality."""


def assemble_report(
    inst: Instance,
    relaxed: SolveResult,
    constrained: SolveResult,
    mode: str = "effective",
) -> PodReport:
    """Build the report from already-computed solver results."""
    opt, opt_c = relaxed.objective, constrained.objective
    if opt <= 0 and opt_c <= 0:
        pod = 1.0
    elif opt_c <= 0:
        pod = INF
    else:
        pod = opt / opt_c

    if opt > 0:
        beta, per_type = disparity_beta(inst, relaxed.assignment)
    else:
        beta, per_type = 1.0, np.full(inst.k, np.nan)  # zero welfare: no disparity

    nu = np.asarray(inst.type_sizes, dtype=float)
    nu = nu / nu.sum() if nu.sum() > 0 else nu
    b4_eff = effective_cap_bound(inst)
    b4_nominal = nominal_cap_bound(inst.quotas.alphas) if inst.quotas is not None else b4_eff
    b4 = b4_nominal if mode == "nominal" else b4_eff
    b5 = bound_thm5(beta, nu, min_alpha_per_type(inst, mode))
    return PodReport(
        opt=opt,
        opt_c=opt_c,
        pod=pod,
        bound_thm4=b4_nominal,
        bound_thm4_effective=b4_eff,
        beta=beta,
        beta_per_type=per_type,
        nu=nu,
        bound_thm5=b5,
        bound_combined=min(b4, b5),
        method=constrained.method,
        mode=mode,
        instance_hash=inst.content_hash(),
        xstar_hash=relaxed.assignment.content_hash(),
    )


def make_tightness_instance(
    type_sizes: tuple[int, ...],
    block_sizes: tuple[int, ...],
    alphas: np.ndarray,
    p0: int,
    q0: int,
) -> Instance:
    """Instance on which the cap-ratio bound holds with equality.

    Agents of type ``p0`` value every item of block ``q0`` at one and all
    other utilities are zero; the designated pair must attain the minimum
    quota, the quota times the block size must be integral, and the type
    must be at least as large as the block.
    """
    alphas = np.asarray(alphas, dtype=float)
    k, l = len(type_sizes), len(block_sizes)
    if alphas.shape != (k, l):
        raise InputError("quota matrix shape must match group counts")
    if not (0 <= p0 < k and 0 <= q0 < l):
        raise InputError("designated pair out of range")
    if type_sizes[p0] < block_sizes[q0]:
        raise InputError("designated type must be at least as large as the block")
    if alphas[p0, q0] > alphas.min() + 1e-12:
        raise InputError("designated pair must attain the minimum quota")
    profile = QuotaProfile(alphas, rounding="exact")
    caps = profile.capacities_for(block_sizes)
    utilities = np.zeros((sum(type_sizes), sum(block_sizes)))
    ar = range(sum(type_sizes[:p0]), sum(type_sizes[:p0 + 1]))
    br = range(sum(block_sizes[:q0]), sum(block_sizes[:q0 + 1]))
    utilities[ar.start:ar.stop, br.start:br.stop] = 1.0
    return Instance(
        type_sizes=tuple(type_sizes),
        block_sizes=tuple(block_sizes),
        utilities=utilities,
        capacities=caps,
        quotas=profile,
    )
