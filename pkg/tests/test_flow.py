import numpy as np
import pytest

from quotamatch import solve_block_uniform, solve_type_uniform
from quotamatch.flow import MinCostFlow

from conftest import block_uniform_instance, type_uniform_instance


def test_hand_built_network_min_cost():
    # s=0 -> {1, 2} -> t=3; cheap path has capacity 1, dearer one capacity 2
    net = MinCostFlow(4)
    net.add_arc(0, 1, 1, 0.0)
    net.add_arc(0, 2, 2, 0.0)
    net.add_arc(1, 3, 1, -5.0)
    net.add_arc(2, 3, 2, -3.0)
    res = net.solve(0, 3, stop_when_nonnegative=True, check_invariants=True)
    assert res.units == 3
    assert res.total_cost == -11.0
    assert res.unit_costs == [-5.0, -3.0, -3.0]


def test_halting_rule_skips_nonnegative_paths():
    net = MinCostFlow(3)
    net.add_arc(0, 1, 2, -1.0)
    net.add_arc(1, 2, 2, 2.0)   # every path costs +1
    res = net.solve(0, 2, stop_when_nonnegative=True)
    assert res.units == 0
    full = MinCostFlow(3)
    full.add_arc(0, 1, 2, -1.0)
    full.add_arc(1, 2, 2, 2.0)
    res2 = full.solve(0, 2, stop_when_nonnegative=False)
    assert res2.units == 2 and res2.total_cost == 2.0


def test_flow_limit_stops_midway():
    net = MinCostFlow(3)
    net.add_arc(0, 1, 5, -1.0)
    net.add_arc(1, 2, 5, 0.0)
    res = net.solve(0, 2, stop_when_nonnegative=False, flow_limit=3)
    assert res.units == 3 and res.total_cost == -3.0


def test_unit_costs_are_nondecreasing_on_random_networks():
    rng = np.random.default_rng(7)
    for _ in range(25):
        inst = type_uniform_instance(rng, n_max=15, m_max=15)
        from quotamatch.solvers import _type_network
        net, s, t, _ = _type_network(inst)
        res = net.solve(s, t, stop_when_nonnegative=False, check_invariants=True)
        assert all(a <= b + 1e-12 for a, b in zip(res.unit_costs, res.unit_costs[1:]))


def test_cyclic_graph_rejected():
    net = MinCostFlow(2)
    net.add_arc(0, 1, 1, 0.0)
    net.add_arc(1, 0, 1, 0.0)
    with pytest.raises(ValueError):
        net.solve(0, 1)


def test_flow_invariants_checked_through_uniform_solvers():
    rng = np.random.default_rng(11)
    for _ in range(10):
        inst = type_uniform_instance(rng, n_max=12, m_max=12)
        solve_type_uniform(inst, check_invariants=True)
        inst2 = block_uniform_instance(rng, n_max=12, m_max=12)
        solve_block_uniform(inst2, check_invariants=True)
