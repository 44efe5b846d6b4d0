"""Assignment solvers: exhaustive oracle, branch-and-bound, relaxed optimum,
flow-based solvers for the two uniform utility classes, greedy, and a MILP
route for larger non-uniform instances.

Every solver returns a :class:`SolveResult` whose objective equals the
welfare of the returned assignment and whose assignment satisfies the
matching constraints; all solvers except ``unconstrained`` also satisfy the
type-block caps.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linear_sum_assignment, linprog, milp
from scipy.sparse import csr_matrix

from .flow import MinCostFlow
from .model import (
    Assignment,
    BudgetExceededError,
    Instance,
    InputError,
    PreconditionError,
    QuotamatchError,
    welfare,
)

DEFAULT_BRUTE_NODE_BUDGET = 10**8


@dataclass
class SolveResult:
    method: str
    objective: float
    optimal: bool
    assignment: Assignment
    ratio: Optional[float] = None       # worst-case guarantee for heuristics
    respects_caps: bool = True
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "method": self.method,
            "objective": self.objective,
            "optimal": self.optimal,
            "pairs": [[i, j] for i, j in self.assignment.pairs],
            "stats": dict(self.stats, respects_caps=self.respects_caps),
        }
        if self.ratio is not None:
            doc["ratio"] = self.ratio
        return doc


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------

def solve_brute_force(inst: Instance, node_budget: int = DEFAULT_BRUTE_NODE_BUDGET) -> SolveResult:
    """Enumerate every feasible assignment; ties favor the lexicographically
    smallest pair list.  Intended as the reference oracle for tiny instances.
    """
    n, m = inst.n, inst.m
    if n > 0 and (m + 1) ** n > node_budget:
        raise BudgetExceededError(
            f"enumeration tree of up to (m+1)^n = {m + 1}^{n} nodes exceeds budget {node_budget}")
    caps = inst.capacities
    type_of, block_of = inst.type_of, inst.block_of
    u = inst.utilities
    item_free = [True] * m
    counts = np.zeros((inst.k, inst.l), dtype=np.int64)
    best_obj = -1.0
    best_pairs: list[tuple[int, int]] = []
    pairs: list[tuple[int, int]] = []
    nodes = 0

    def visit(i: int, acc: float) -> None:
        nonlocal best_obj, best_pairs, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError(f"brute-force node budget {node_budget} exceeded")
        if i == n:
            if acc > best_obj or (acc == best_obj and pairs < best_pairs):
                best_obj = acc
                best_pairs = list(pairs)
            return
        p = type_of[i]
        for j in range(m):
            q = block_of[j]
            if item_free[j] and counts[p, q] < caps[p, q]:
                item_free[j] = False
                counts[p, q] += 1
                pairs.append((i, j))
                visit(i + 1, acc + u[i, j])
                pairs.pop()
                counts[p, q] -= 1
                item_free[j] = True
        visit(i + 1, acc)  # leave agent i unassigned

    visit(0, 0.0)
    asg = Assignment(best_pairs)
    return SolveResult(
        method="brute",
        objective=welfare(inst, asg),
        optimal=True,
        assignment=asg,
        stats={"nodes": nodes},
    )


# ---------------------------------------------------------------------------
# Relaxed optimum (caps ignored)
# ---------------------------------------------------------------------------

def solve_unconstrained(inst: Instance) -> SolveResult:
    """Maximum-weight matching with the type-block caps dropped.

    Backed by scipy's exact rectangular assignment solver; because utilities
    are nonnegative, the full-cardinality matching it returns attains the
    maximum over all matchings.  Zero-utility pairs are dropped afterwards,
    which leaves the objective unchanged.
    """
    n, m = inst.n, inst.m
    if n == 0 or m == 0:
        asg = Assignment(())
        return SolveResult("unconstrained", 0.0, True, asg, respects_caps=False)
    rows, cols = linear_sum_assignment(inst.utilities, maximize=True)
    pairs = [(int(i), int(j)) for i, j in zip(rows, cols) if inst.utilities[i, j] > 0]
    asg = Assignment(pairs)
    return SolveResult(
        method="unconstrained",
        objective=welfare(inst, asg),
        optimal=True,
        assignment=asg,
        respects_caps=False,
        stats={"matched": len(pairs)},
    )


# ---------------------------------------------------------------------------
# Greedy 1/3-approximation
# ---------------------------------------------------------------------------

def solve_greedy(inst: Instance) -> SolveResult:
    """Accept pairs in nonincreasing utility order while all three partition
    constraints (agent, item, type-block cap) stay satisfied.

    Greedy on the intersection of three partition matroids guarantees at
    least a third of the constrained optimum.
    """
    n, m = inst.n, inst.m
    u = inst.utilities
    ii = np.repeat(np.arange(n), m)
    jj = np.tile(np.arange(m), n)
    order = np.lexsort((jj, ii, -u.reshape(-1)))  # utility desc, then (i, j)
    agent_free = np.ones(n, dtype=bool)
    item_free = np.ones(m, dtype=bool)
    counts = np.zeros((inst.k, inst.l), dtype=np.int64)
    caps = inst.capacities
    pairs: list[tuple[int, int]] = []
    for idx in order:
        i, j = int(ii[idx]), int(jj[idx])
        p, q = inst.type_of[i], inst.block_of[j]
        if agent_free[i] and item_free[j] and counts[p, q] < caps[p, q]:
            agent_free[i] = False
            item_free[j] = False
            counts[p, q] += 1
            pairs.append((i, j))
    asg = Assignment(pairs)
    return SolveResult(
        method="greedy",
        objective=welfare(inst, asg),
        optimal=False,
        assignment=asg,
        ratio=1.0 / 3.0,
        stats={"accepted": len(pairs)},
    )


# ---------------------------------------------------------------------------
# Exact branch-and-bound
# ---------------------------------------------------------------------------

class _Budget(Exception):
    pass


def solve_exact(
    inst: Instance,
    node_budget: Optional[int] = None,
    time_budget: Optional[float] = None,
) -> SolveResult:
    """Depth-first branch-and-bound over agents in descending max-utility
    order.  Each node branches on the feasible items for the next agent
    (best first) and lastly on leaving it unassigned; the bound adds the
    cap-free optimum of the remaining subinstance, so pruning is admissible.

    With a node or time budget, the best incumbent is returned and flagged
    as a heuristic when the budget runs out.
    """
    n, m = inst.n, inst.m
    u = inst.utilities
    caps = inst.capacities
    type_of, block_of = inst.type_of, inst.block_of
    if n == 0 or m == 0:
        asg = Assignment(())
        return SolveResult("exact", 0.0, True, asg, stats={"nodes": 0})

    row_max = u.max(axis=1)
    agent_order = sorted(range(n), key=lambda i: (-row_max[i], i))
    pref = [np.lexsort((np.arange(m), -u[i])) for i in range(n)]
    rank = np.empty((n, m), dtype=np.int64)
    for i in range(n):
        rank[i, pref[i]] = np.arange(m)

    # interchangeable agents (same type, identical rows) sit adjacently in
    # the branch order; force their item ranks to increase, unassigned last
    same_as_prev = [False] * n
    for pos in range(1, n):
        a, b = agent_order[pos - 1], agent_order[pos]
        same_as_prev[pos] = (type_of[a] == type_of[b]
                             and bool(np.array_equal(u[a], u[b])))

    # interchangeable items (same block, identical columns): branch only on
    # the lowest-index free member of each group
    item_group = np.empty(m, dtype=np.int64)
    group_key: dict[tuple, int] = {}
    for j in range(m):
        key = (int(block_of[j]), u[:, j].tobytes())
        item_group[j] = group_key.setdefault(key, len(group_key))

    seed = solve_greedy(inst)
    best_obj = seed.objective
    best_pairs = list(seed.assignment.pairs)

    item_free = np.ones(m, dtype=bool)
    counts = np.zeros((inst.k, inst.l), dtype=np.int64)
    pairs: list[tuple[int, int]] = []
    stats = {"nodes": 0, "bound_calls": 0, "lp_calls": 0, "pruned": 0}
    deadline = time.monotonic() + time_budget if time_budget is not None else None

    def _masked_sub(pos: int):
        """Bound matrix: remaining agents x free items, with every pair whose
        type-block cap is already exhausted zeroed out (still admissible,
        since a completion cannot use those pairs at all)."""
        remaining = np.asarray(agent_order[pos:])
        free = np.flatnonzero(item_free)
        if remaining.size == 0 or free.size == 0:
            return remaining, free, None
        sub = u[remaining[:, None], free[None, :]].copy()
        saturated = counts >= caps
        sub[saturated[type_of[remaining][:, None], block_of[free][None, :]]] = 0.0
        return remaining, free, sub

    def quick_bound(sub) -> float:
        if sub is None:
            return 0.0
        return float(sub.max(axis=1).sum())

    def matching_bound(remaining, free, sub) -> tuple[float, Optional[list]]:
        """Cap-free matching bound on the masked matrix; when the matching
        happens to respect the residual caps it is returned as a feasible
        completion."""
        if sub is None:
            return 0.0, []
        stats["bound_calls"] += 1
        rows, cols = linear_sum_assignment(sub, maximize=True)
        value = float(sub[rows, cols].sum())
        completion = [(int(remaining[r]), int(free[c]))
                      for r, c in zip(rows, cols) if sub[r, c] > 0]
        usage = np.zeros_like(counts)
        for i, j in completion:
            usage[type_of[i], block_of[j]] += 1
        if np.all(counts + usage <= caps):
            return value, completion
        return value, None

    def lp_bound(remaining, free, sub) -> tuple[float, Optional[list]]:
        """Relaxation with the residual cap constraints included; tighter
        than the matching bound.  An integral solution doubles as a
        cap-feasible completion (verified exactly before use)."""
        stats["lp_calls"] += 1
        r, f = remaining.size, free.size
        nv = r * f
        rr = np.repeat(np.arange(r), f)
        ff = np.tile(np.arange(f), r)
        tb_row = (type_of[remaining][rr] * inst.l + block_of[free][ff])
        rows_idx = np.concatenate([rr, r + ff, r + f + tb_row])
        cols_idx = np.concatenate([np.arange(nv)] * 3)
        a = csr_matrix((np.ones(3 * nv), (rows_idx, cols_idx)),
                       shape=(r + f + inst.k * inst.l, nv))
        residual = (caps - counts).reshape(-1).astype(float)
        ub = np.concatenate([np.ones(r), np.ones(f), residual])
        res = linprog(-sub.reshape(-1), A_ub=a, b_ub=ub, bounds=(0, 1), method="highs")
        if res.status != 0 or res.x is None:
            return float("inf"), None  # no pruning on solver trouble
        value = float(-res.fun)
        x = res.x.reshape(r, f)
        if np.abs(x - np.round(x)).max() < 1e-7:
            chosen = np.argwhere(np.round(x) > 0.5)
            completion = [(int(remaining[a_]), int(free[b_])) for a_, b_ in chosen
                          if sub[a_, b_] > 0]
            usage = np.zeros_like(counts)
            ok = True
            seen_i: set[int] = set()
            seen_j: set[int] = set()
            for i, j in completion:
                if i in seen_i or j in seen_j:
                    ok = False
                    break
                seen_i.add(i)
                seen_j.add(j)
                usage[type_of[i], block_of[j]] += 1
            if ok and np.all(counts + usage <= caps):
                exact_value = float(sum(u[i, j] for i, j in completion))
                return max(value, exact_value), completion
        return value, None

    def visit(pos: int, acc: float, min_rank: int) -> None:
        nonlocal best_obj, best_pairs
        stats["nodes"] += 1
        if node_budget is not None and stats["nodes"] > node_budget:
            raise _Budget
        if deadline is not None and stats["nodes"] % 1024 == 0 and time.monotonic() > deadline:
            raise _Budget
        if pos == n:
            if acc > best_obj:
                best_obj = acc
                best_pairs = list(pairs)
            return
        remaining, free, sub = _masked_sub(pos)
        if acc + quick_bound(sub) <= best_obj:
            stats["pruned"] += 1
            return
        value, completion = matching_bound(remaining, free, sub)
        if completion is not None:
            # the bound is attained by a cap-feasible completion: close the node
            if acc + value > best_obj:
                best_obj = acc + value
                best_pairs = list(pairs) + completion
            stats["pruned"] += 1
            return
        if acc + value <= best_obj:
            stats["pruned"] += 1
            return
        lp_value, lp_completion = lp_bound(remaining, free, sub)
        if lp_completion is not None:
            exact_value = float(sum(u[i, j] for i, j in lp_completion))
            if acc + exact_value > best_obj:
                best_obj = acc + exact_value
                best_pairs = list(pairs) + lp_completion
            if acc + lp_value <= best_obj + 1e-6 * max(1.0, abs(lp_value)):
                stats["pruned"] += 1
                return
        # small slack guards against the LP solver's own tolerance
        if acc + lp_value + 1e-6 * max(1.0, abs(lp_value)) <= best_obj:
            stats["pruned"] += 1
            return
        i = agent_order[pos]
        p = type_of[i]
        start = min_rank if same_as_prev[pos] else 0
        seen_groups: set[int] = set()
        for j in pref[i][start:]:
            q = block_of[j]
            if not item_free[j] or counts[p, q] >= caps[p, q]:
                continue
            g = int(item_group[j])
            if g in seen_groups:
                continue
            seen_groups.add(g)
            item_free[j] = False
            counts[p, q] += 1
            pairs.append((i, int(j)))
            visit(pos + 1, acc + u[i, j], int(rank[i, j]) + 1)
            pairs.pop()
            counts[p, q] -= 1
            item_free[j] = True
        visit(pos + 1, acc, m + 1)  # unassigned: identical successors follow suit

    exhausted = False
    try:
        visit(0, 0.0, 0)
    except _Budget:
        exhausted = True
        stats["budget_exhausted"] = True

    asg = Assignment(best_pairs)
    return SolveResult(
        method="exact",
        objective=welfare(inst, asg),
        optimal=not exhausted,
        assignment=asg,
        ratio=None,
        stats=stats,
    )


# ---------------------------------------------------------------------------
# Uniform utility classes (poly-time, via min-cost flow)
# ---------------------------------------------------------------------------

def type_uniformity_violation(inst: Instance) -> Optional[tuple[int, int, int, int]]:
    """First (p, i, i', j) where two agents of type p value item j differently,
    or None when all same-type agents share each item utility exactly."""
    for p in range(inst.k):
        rng = inst.type_range(p)
        if len(rng) <= 1:
            continue
        base = inst.utilities[rng.start]
        block = inst.utilities[rng.start + 1:rng.stop]
        diff = block != base[None, :]
        if diff.any():
            loc = np.argwhere(diff)[0]
            return (p, rng.start, rng.start + 1 + int(loc[0]), int(loc[1]))
    return None


def block_uniformity_violation(inst: Instance) -> Optional[tuple[int, int, int, int]]:
    """First (q, j, j', i) where an agent i values two items of block q
    differently, or None when each agent is indifferent within every block."""
    for q in range(inst.l):
        rng = inst.block_range(q)
        if len(rng) <= 1:
            continue
        base = inst.utilities[:, rng.start]
        block = inst.utilities[:, rng.start + 1:rng.stop]
        diff = block != base[:, None]
        if diff.any():
            loc = np.argwhere(diff)[0]
            return (q, rng.start, rng.start + 1 + int(loc[1]), int(loc[0]))
    return None


def is_type_uniform(inst: Instance) -> bool:
    return type_uniformity_violation(inst) is None


def is_block_uniform(inst: Instance) -> bool:
    return block_uniformity_violation(inst) is None


def _type_network(inst: Instance):
    """Layered network: source -> type -> (type, block) -> item -> sink.

    Arc capacities are type size, cap, 1 and 1 respectively; the only
    nonzero costs are the negated shared utilities on the item arcs.
    """
    k, l, m = inst.k, inst.l, inst.m
    source = 0
    type_node = lambda p: 1 + p
    tb_node = lambda p, q: 1 + k + p * l + q
    item_node = lambda j: 1 + k + k * l + j
    sink = 1 + k + k * l + m
    net = MinCostFlow(sink + 1)
    shared = np.zeros((k, m))
    for p in range(k):
        if inst.type_sizes[p] > 0:
            shared[p] = inst.utilities[inst.type_range(p).start]
    item_arcs: list[tuple[int, int, int]] = []  # (p, j, arc_id) in (p, q, j) order
    for p in range(k):
        net.add_arc(source, type_node(p), inst.type_sizes[p])
        for q in range(l):
            net.add_arc(type_node(p), tb_node(p, q), int(inst.capacities[p, q]))
    for p in range(k):
        for q in range(l):
            for j in inst.block_range(q):
                arc = net.add_arc(tb_node(p, q), item_node(j), 1, -float(shared[p, j]))
                item_arcs.append((p, j, arc))
    for j in range(m):
        net.add_arc(item_node(j), sink, 1)
    return net, source, sink, item_arcs


def solve_type_uniform(inst: Instance, explicit_min: bool = False,
                       check_invariants: bool = False) -> SolveResult:
    """Optimal constrained assignment when same-type agents share utilities.

    The default mode pushes successive shortest paths and halts at the first
    nonnegative-cost path, which attains the minimum over all flow values;
    ``explicit_min`` instead solves one fixed-value problem per flow value
    and takes the cheapest, as a direct cross-check of the halting rule.
    """
    bad = type_uniformity_violation(inst)
    if bad is not None:
        p, i0, i1, j = bad
        raise PreconditionError(
            f"instance is not type-uniform: agents {i0} and {i1} of type {p} "
            f"disagree on item {j}")
    if explicit_min:
        costs = []
        for target in range(1, inst.n + 1):
            net, source, sink, _ = _type_network(inst)
            res = net.solve(source, sink, stop_when_nonnegative=False, flow_limit=target)
            if res.units < target:
                break
            costs.append(res.total_cost)
        best_value = 0
        best_cost = 0.0
        for idx, c in enumerate(costs):
            if c < best_cost:
                best_cost = c
                best_value = idx + 1
        net, source, sink, item_arcs = _type_network(inst)
        result = net.solve(source, sink, stop_when_nonnegative=False,
                           flow_limit=best_value, check_invariants=check_invariants)
    else:
        net, source, sink, item_arcs = _type_network(inst)
        result = net.solve(source, sink, check_invariants=check_invariants)
    next_agent = [inst.type_range(p).start for p in range(inst.k)]
    pairs: list[tuple[int, int]] = []
    for p, j, arc in item_arcs:
        if result.arc_flow[arc] == 1:
            pairs.append((next_agent[p], j))
            next_agent[p] += 1
    asg = Assignment(pairs)
    return SolveResult(
        method="mcf-type",
        objective=welfare(inst, asg),
        optimal=True,
        assignment=asg,
        stats={"flow_units": result.units, "flow_cost": result.total_cost,
               "explicit_min": explicit_min},
    )


def _block_network(inst: Instance):
    """Mirror network for block-uniform utilities:
    source -> agent -> (type, block) -> block -> sink, with the negated
    shared utilities on the agent arcs and the cap on the block arcs.
    """
    n, k, l = inst.n, inst.k, inst.l
    source = 0
    agent_node = lambda i: 1 + i
    tb_node = lambda p, q: 1 + n + p * l + q
    block_node = lambda q: 1 + n + k * l + q
    sink = 1 + n + k * l + l
    net = MinCostFlow(sink + 1)
    shared = np.zeros((n, l))
    for q in range(l):
        if inst.block_sizes[q] > 0:
            shared[:, q] = inst.utilities[:, inst.block_range(q).start]
    agent_arcs: list[tuple[int, int, int]] = []  # (i, q, arc_id) in (i, q) order
    for i in range(n):
        net.add_arc(source, agent_node(i), 1)
        p = int(inst.type_of[i])
        for q in range(l):
            arc = net.add_arc(agent_node(i), tb_node(p, q), 1, -float(shared[i, q]))
            agent_arcs.append((i, q, arc))
    for p in range(k):
        for q in range(l):
            net.add_arc(tb_node(p, q), block_node(q), int(inst.capacities[p, q]))
    for q in range(l):
        net.add_arc(block_node(q), sink, inst.block_sizes[q])
    return net, source, sink, agent_arcs


def solve_block_uniform(inst: Instance, explicit_min: bool = False,
                        check_invariants: bool = False) -> SolveResult:
    """Optimal constrained assignment when items are interchangeable within
    each block for every agent."""
    bad = block_uniformity_violation(inst)
    if bad is not None:
        q, j0, j1, i = bad
        raise PreconditionError(
            f"instance is not block-uniform: agent {i} distinguishes items "
            f"{j0} and {j1} of block {q}")
    if explicit_min:
        costs = []
        for target in range(1, inst.n + 1):
            net, source, sink, _ = _block_network(inst)
            res = net.solve(source, sink, stop_when_nonnegative=False, flow_limit=target)
            if res.units < target:
                break
            costs.append(res.total_cost)
        best_value = 0
        best_cost = 0.0
        for idx, c in enumerate(costs):
            if c < best_cost:
                best_cost = c
                best_value = idx + 1
        net, source, sink, agent_arcs = _block_network(inst)
        result = net.solve(source, sink, stop_when_nonnegative=False,
                           flow_limit=best_value, check_invariants=check_invariants)
    else:
        net, source, sink, agent_arcs = _block_network(inst)
        result = net.solve(source, sink, check_invariants=check_invariants)
    next_item = [inst.block_range(q).start for q in range(inst.l)]
    pairs: list[tuple[int, int]] = []
    for i, q, arc in agent_arcs:
        if result.arc_flow[arc] == 1:
            pairs.append((i, next_item[q]))
            next_item[q] += 1
    asg = Assignment(pairs)
    return SolveResult(
        method="mcf-block",
        objective=welfare(inst, asg),
        optimal=True,
        assignment=asg,
        stats={"flow_units": result.units, "flow_cost": result.total_cost,
               "explicit_min": explicit_min},
    )


# ---------------------------------------------------------------------------
# MILP route (exact at experiment scale)
# ---------------------------------------------------------------------------

def solve_milp(inst: Instance) -> SolveResult:
    """Exact solve of the 0/1 program via HiGHS branch-and-cut.

    Used by the experiment pipeline for non-uniform instances too large for
    the pure-Python branch-and-bound.
    """
    n, m = inst.n, inst.m
    if n == 0 or m == 0:
        return SolveResult("milp", 0.0, True, Assignment(()))
    k, l = inst.k, inst.l
    nv = n * m
    ii = np.repeat(np.arange(n), m)
    jj = np.tile(np.arange(m), n)
    var = np.arange(nv)
    rows = np.concatenate([ii, n + jj, n + m + inst.type_of[ii] * l + inst.block_of[jj]])
    cols = np.concatenate([var, var, var])
    a = csr_matrix((np.ones(3 * nv), (rows, cols)), shape=(n + m + k * l, nv))
    ub = np.concatenate([np.ones(n), np.ones(m),
                         inst.capacities.reshape(-1).astype(float)])
    res = milp(
        c=-inst.utilities.reshape(-1),
        constraints=LinearConstraint(a, -np.inf, ub),
        integrality=np.ones(nv),
        bounds=Bounds(0, 1),
        options={"mip_rel_gap": 0.0},
    )
    if res.status != 0 or res.x is None:
        raise QuotamatchError(f"MILP solver failed: {res.message}")
    chosen = res.x.reshape(n, m) > 0.5
    pairs = [(int(i), int(j)) for i, j in np.argwhere(chosen)]
    asg = Assignment(pairs)
    return SolveResult(
        method="milp",
        objective=welfare(inst, asg),
        optimal=True,
        assignment=asg,
        stats={"milp_status": int(res.status)},
    )


# ---------------------------------------------------------------------------
# Registry and dispatch
# ---------------------------------------------------------------------------

SOLVERS: dict[str, Callable[..., SolveResult]] = {
    "brute": solve_brute_force,
    "exact": solve_exact,
    "mcf-type": solve_type_uniform,
    "mcf-block": solve_block_uniform,
    "greedy": solve_greedy,
    "unconstrained": solve_unconstrained,
    "milp": solve_milp,
}

EXACT_METHODS = ("brute", "exact", "mcf-type", "mcf-block", "milp")


def solve(inst: Instance, method: str, **kwargs: Any) -> SolveResult:
    if method == "auto":
        method = choose_exact_method(inst)
        return SOLVERS[method](inst, **kwargs)
    if method not in SOLVERS:
        raise InputError(f"unknown solver {method!r}; choose from "
                         f"{', '.join(sorted(SOLVERS))} or 'auto'")
    return SOLVERS[method](inst, **kwargs)


def choose_exact_method(inst: Instance) -> str:
    """Pick the cheapest exact solver that applies to the instance."""
    if is_type_uniform(inst):
        return "mcf-type"
    if is_block_uniform(inst):
        return "mcf-block"
    return "milp"
