"""Edge-colored budgeted matching: the problem this assignment model reduces
to and from.

``reduce_to_bcm`` maps an instance onto a complete bipartite graph whose
colors are the (type, block) pairs, preserving the optimum exactly, and
serves as the interop point for external budgeted-matching solvers.
``reduce_from_bcm`` is the reverse construction used to generate hard
assignment instances from matching instances, preserving the decision
threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .model import Instance, InputError


@dataclass(frozen=True)
class BCMEdge:
    left: int
    right: int
    color: int
    profit: float


@dataclass(frozen=True)
class BCMInstance:
    """Weighted bipartite graph with per-color budgets on matched edges."""

    num_left: int
    num_right: int
    edges: tuple[BCMEdge, ...]
    budgets: tuple[int, ...]
    threshold: Optional[float] = None

    def __post_init__(self) -> None:
        for e in self.edges:
            if not (0 <= e.left < self.num_left and 0 <= e.right < self.num_right):
                raise InputError(f"edge ({e.left}, {e.right}) out of vertex range")
            if not (0 <= e.color < len(self.budgets)):
                raise InputError(f"edge color {e.color} has no budget")
            if e.profit < 0:
                raise InputError("edge profits must be nonnegative")
        if any(b < 0 for b in self.budgets):
            raise InputError("color budgets must be nonnegative")

    @property
    def num_colors(self) -> int:
        return len(self.budgets)

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "left": self.num_left,
            "right": self.num_right,
            "edges": [[e.left, e.right, e.color, e.profit] for e in self.edges],
            "budgets": list(self.budgets),
        }
        if self.threshold is not None:
            doc["threshold"] = self.threshold
        return doc

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "BCMInstance":
        try:
            edges = tuple(BCMEdge(int(a), int(b), int(c), float(w))
                          for a, b, c, w in doc["edges"])
            return BCMInstance(
                num_left=int(doc["left"]),
                num_right=int(doc["right"]),
                edges=edges,
                budgets=tuple(int(b) for b in doc["budgets"]),
                threshold=doc.get("threshold"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed budgeted-matching document: {exc}") from exc


def solve_bcm_brute(bcm: BCMInstance) -> tuple[float, tuple[int, ...]]:
    """Exhaustive maximum-profit budgeted matching (edge indices returned).

    Include/exclude search over edges; only usable for small graphs.
    """
    edges = bcm.edges
    left_used = [False] * bcm.num_left
    right_used = [False] * bcm.num_right
    color_count = [0] * bcm.num_colors
    best = [0.0, ()]  # empty matching is always feasible

    def visit(idx: int, profit: float, chosen: list[int]) -> None:
        if idx == len(edges):
            if profit > best[0]:
                best[0] = profit
                best[1] = tuple(chosen)
            return
        e = edges[idx]
        if (not left_used[e.left] and not right_used[e.right]
                and color_count[e.color] < bcm.budgets[e.color]):
            left_used[e.left] = True
            right_used[e.right] = True
            color_count[e.color] += 1
            chosen.append(idx)
            visit(idx + 1, profit + e.profit, chosen)
            chosen.pop()
            color_count[e.color] -= 1
            right_used[e.right] = False
            left_used[e.left] = False
        visit(idx + 1, profit, chosen)

    visit(0, 0.0, [])
    return best[0], best[1]


def reduce_to_bcm(inst: Instance) -> BCMInstance:
    """Complete bipartite graph: one edge per (agent, item), colored by the
    (type, block) pair in lexicographic order, with budgets equal to caps.

    Feasible assignments and feasible matchings correspond one-to-one with
    equal objective values.
    """
    edges = []
    for i in range(inst.n):
        p = int(inst.type_of[i])
        for j in range(inst.m):
            q = int(inst.block_of[j])
            edges.append(BCMEdge(i, j, p * inst.l + q, float(inst.utilities[i, j])))
    budgets = tuple(int(c) for c in inst.capacities.reshape(-1))
    return BCMInstance(inst.n, inst.m, tuple(edges), budgets)


def reduce_from_bcm(bcm: BCMInstance, threshold: Optional[float] = None
                    ) -> tuple[Instance, float]:
    """Build an assignment instance whose decision problem matches the
    budgeted-matching decision at the derived welfare threshold.

    Agents are the edges, typed by color.  The first block holds one item
    per right vertex (worth the edge profit to its edge-agent); the second
    holds deg(a) - 1 filler items per left vertex a, each worth a constant
    larger than any achievable profit total to that vertex's edge-agents.
    Returns the instance together with the equivalent welfare threshold.

    Isolated left vertices carry no edges and are dropped before the count
    of filler items, which keeps the threshold arithmetic consistent.
    """
    if threshold is None:
        threshold = bcm.threshold
    if threshold is None:
        raise InputError("a profit threshold is required")
    degrees = [0] * bcm.num_left
    for e in bcm.edges:
        degrees[e.left] += 1
    active_left = [a for a in range(bcm.num_left) if degrees[a] > 0]
    num_edges = len(bcm.edges)
    phi = 1.0 + float(sum(e.profit for e in bcm.edges))
    num_filler = num_edges - len(active_left)

    # agents grouped by color; remember each edge's agent index
    order = sorted(range(num_edges), key=lambda idx: (bcm.edges[idx].color, idx))
    agent_of_edge = {edge_idx: agent for agent, edge_idx in enumerate(order)}
    type_sizes = [0] * bcm.num_colors
    for e in bcm.edges:
        type_sizes[e.color] += 1

    # block 0: one item per right vertex; block 1: filler items per left vertex
    right_item = {b: b for b in range(bcm.num_right)}
    filler_start = {}
    offset = bcm.num_right
    for a in active_left:
        filler_start[a] = offset
        offset += degrees[a] - 1
    m = offset
    n = num_edges

    utilities = np.zeros((n, m))
    for edge_idx, e in enumerate(bcm.edges):
        agent = agent_of_edge[edge_idx]
        utilities[agent, right_item[e.right]] = e.profit
        start = filler_start[e.left]
        utilities[agent, start:start + degrees[e.left] - 1] = phi

    caps = np.zeros((bcm.num_colors, 2), dtype=np.int64)
    for color in range(bcm.num_colors):
        caps[color, 0] = bcm.budgets[color]
        caps[color, 1] = min(type_sizes[color], num_filler)

    inst = Instance(
        type_sizes=tuple(type_sizes),
        block_sizes=(bcm.num_right, num_filler),
        utilities=utilities,
        capacities=caps,
        metadata={"construction": "from-bcm", "phi": phi,
                  "agent_of_edge": [agent_of_edge[idx] for idx in range(num_edges)]},
    )
    return inst, float(threshold) + phi * num_filler
