"""Min-cost flow by successive shortest paths with node potentials.

Costs may be negative on the initial graph (they are negated utilities);
the networks built by the solvers are layered DAGs, so initial potentials
come from a single topological-order relaxation.  Subsequent shortest
paths run Dijkstra on reduced costs, which stay nonnegative after every
augmentation.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional

INF = float("inf")


@dataclass
class FlowResult:
    units: int                     # total flow value v(f)
    total_cost: float              # gamma(f)
    unit_costs: list[float]        # cost of each pushed unit, in push order
    arc_flow: list[int]            # flow on each forward arc, by arc id


class MinCostFlow:
    """Residual-graph successive-shortest-path solver.

    Forward arc ``e`` and its reverse live at ids ``2e`` and ``2e + 1``.
    """

    def __init__(self, num_nodes: int):
        self.num_nodes = num_nodes
        self.to: list[int] = []
        self.res: list[int] = []      # residual capacity
        self.cost: list[float] = []
        self.adj: list[list[int]] = [[] for _ in range(num_nodes)]
        self._caps: list[int] = []    # original forward capacities

    def add_arc(self, tail: int, head: int, cap: int, cost: float = 0.0) -> int:
        """Add a forward arc; returns its arc index (for flow lookup)."""
        if cap < 0:
            raise ValueError("arc capacity must be nonnegative")
        arc_id = len(self._caps)
        self.adj[tail].append(len(self.to))
        self.to.append(head)
        self.res.append(cap)
        self.cost.append(cost)
        self.adj[head].append(len(self.to))
        self.to.append(tail)
        self.res.append(0)
        self.cost.append(-cost)
        self._caps.append(cap)
        return arc_id

    # -- potential initialization ------------------------------------------

    def _topological_order(self) -> list[int]:
        indeg = [0] * self.num_nodes
        for e in range(0, len(self.to), 2):
            indeg[self.to[e]] += 1
        order = [v for v in range(self.num_nodes) if indeg[v] == 0]
        head = 0
        while head < len(order):
            u = order[head]
            head += 1
            for e in self.adj[u]:
                if e % 2 == 0:
                    v = self.to[e]
                    indeg[v] -= 1
                    if indeg[v] == 0:
                        order.append(v)
        if len(order) != self.num_nodes:
            raise ValueError("flow network is not acyclic")
        return order

    def _initial_potentials(self, source: int) -> list[float]:
        dist = [INF] * self.num_nodes
        dist[source] = 0.0
        for u in self._topological_order():
            if dist[u] == INF:
                continue
            for e in self.adj[u]:
                if e % 2 == 0 and self.res[e] > 0:
                    v = self.to[e]
                    nd = dist[u] + self.cost[e]
                    if nd < dist[v]:
                        dist[v] = nd
        # nodes unreachable through positive-capacity arcs never join a path
        return [d if d != INF else 0.0 for d in dist]

    # -- main loop ----------------------------------------------------------

    def solve(
        self,
        source: int,
        sink: int,
        stop_when_nonnegative: bool = True,
        flow_limit: Optional[int] = None,
        check_invariants: bool = False,
    ) -> FlowResult:
        """Push flow along successive shortest paths.

        With ``stop_when_nonnegative`` the loop halts as soon as the
        cheapest augmenting path has nonnegative cost; otherwise it runs to
        ``flow_limit`` units (or to the maximum flow).
        """
        pot = self._initial_potentials(source)
        units = 0
        total_cost = 0.0
        unit_costs: list[float] = []
        n = self.num_nodes
        while flow_limit is None or units < flow_limit:
            dist = [INF] * n
            dist[source] = 0.0
            parent_arc: list[int] = [-1] * n
            heap: list[tuple[float, int]] = [(0.0, source)]
            seen = [False] * n
            while heap:
                d, u = heapq.heappop(heap)
                if seen[u]:
                    continue
                seen[u] = True
                for e in self.adj[u]:
                    if self.res[e] <= 0:
                        continue
                    v = self.to[e]
                    if seen[v]:
                        continue
                    rc = self.cost[e] + pot[u] - pot[v]
                    if check_invariants and rc < -1e-9:
                        raise AssertionError(f"negative reduced cost {rc} on arc {u}->{v}")
                    # rounding can push a mathematically zero reduced cost a
                    # few ulp below zero, which would break Dijkstra
                    nd = d + max(rc, 0.0)
                    if nd < dist[v]:
                        dist[v] = nd
                        parent_arc[v] = e
                        heapq.heappush(heap, (nd, v))
            if dist[sink] == INF:
                break
            for v in range(n):
                if dist[v] != INF:
                    pot[v] += dist[v]
            path_cost = pot[sink]  # true cost: pot[source] stays 0
            if stop_when_nonnegative and path_cost >= 0:
                break
            bottleneck = flow_limit - units if flow_limit is not None else 1 << 60
            v = sink
            while v != source:
                e = parent_arc[v]
                bottleneck = min(bottleneck, self.res[e])
                v = self.to[e ^ 1]
            v = sink
            while v != source:
                e = parent_arc[v]
                self.res[e] -= bottleneck
                self.res[e ^ 1] += bottleneck
                v = self.to[e ^ 1]
            units += bottleneck
            total_cost += bottleneck * path_cost
            unit_costs.extend([path_cost] * bottleneck)
        arc_flow = [self._caps[a] - self.res[2 * a] for a in range(len(self._caps))]
        if check_invariants:
            self._verify(source, sink, arc_flow, total_cost)
        return FlowResult(units=units, total_cost=total_cost,
                          unit_costs=unit_costs, arc_flow=arc_flow)

    def _verify(self, source: int, sink: int, arc_flow: list[int], total_cost: float) -> None:
        balance = [0] * self.num_nodes
        cost = 0.0
        for a, f in enumerate(arc_flow):
            if f < 0 or f > self._caps[a]:
                raise AssertionError(f"arc {a} flow {f} violates capacity {self._caps[a]}")
            tail = self.to[2 * a + 1]
            head = self.to[2 * a]
            balance[tail] -= f
            balance[head] += f
            cost += f * self.cost[2 * a]
        for v in range(self.num_nodes):
            if v not in (source, sink) and balance[v] != 0:
                raise AssertionError(f"flow not conserved at node {v}")
        if abs(cost - total_cost) > 1e-6 * max(1.0, abs(cost)):
            raise AssertionError(f"cost mismatch: arcs say {cost}, loop says {total_cost}")


def min_cost_at_value(network_builder, target_flow: int) -> Optional[float]:
    """Cost of the min-cost flow of value exactly ``target_flow``.

    Solves a fresh network (built by ``network_builder()``) per call, so
    repeated calls for different values are independent of each other; used
    as the direct per-value oracle for the halting rule.  Returns None when
    the network cannot carry that much flow.
    """
    net, source, sink = network_builder()
    result = net.solve(source, sink, stop_when_nonnegative=False, flow_limit=target_flow)
    if result.units < target_flow:
        return None
    return result.total_cost
