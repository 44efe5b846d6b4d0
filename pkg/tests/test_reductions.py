import numpy as np
import pytest

from quotamatch import (
    Assignment,
    BCMEdge,
    BCMInstance,
    Instance,
    InputError,
    check_feasible,
    reduce_from_bcm,
    reduce_to_bcm,
    solve_bcm_brute,
    solve_brute_force,
    welfare,
)

from conftest import rand_instance


def rand_bcm(rng, max_side=3, max_profit=9):
    na = int(rng.integers(1, max_side + 1))
    nb = int(rng.integers(1, max_side + 1))
    colors = int(rng.integers(1, 3))
    edges = []
    for a in range(na):
        for b in range(nb):
            if rng.random() < 0.6:
                edges.append(BCMEdge(a, b, int(rng.integers(colors)),
                                     float(rng.integers(0, max_profit + 1))))
    if not edges:
        edges.append(BCMEdge(0, 0, 0, 1.0))
    budgets = tuple(int(x) for x in rng.integers(0, 3, size=colors))
    return BCMInstance(na, nb, tuple(edges), budgets)


# ---------------------------------------------------------------------------
# assignment -> budgeted matching
# ---------------------------------------------------------------------------

def test_to_bcm_one_by_one():
    inst = Instance((1,), (1,), np.array([[4.0]]), np.array([[1]]))
    bcm = reduce_to_bcm(inst)
    assert len(bcm.edges) == 1
    assert bcm.num_colors == 1
    assert bcm.budgets == (1,)
    assert bcm.edges[0].profit == 4.0


def test_to_bcm_color_count_is_k_times_l():
    rng = np.random.default_rng(2)
    for _ in range(10):
        inst = rand_instance(rng)
        bcm = reduce_to_bcm(inst)
        assert bcm.num_colors == inst.k * inst.l
        assert len(bcm.edges) == inst.n * inst.m


def test_to_bcm_preserves_optimum():
    rng = np.random.default_rng(3)
    done = 0
    while done < 15:
        inst = rand_instance(rng)
        if inst.n > 4 or inst.m > 4 or inst.n == 0 or inst.m == 0:
            continue
        done += 1
        opt_c = solve_brute_force(inst).objective
        best_profit, _ = solve_bcm_brute(reduce_to_bcm(inst))
        assert best_profit == opt_c


def test_to_bcm_two_by_two_shape():
    u = np.arange(9, dtype=float).reshape(3, 3)
    inst = Instance((1, 2), (2, 1), u, np.array([[1, 1], [1, 1]]))
    bcm = reduce_to_bcm(inst)
    assert len(bcm.edges) == 9 and bcm.num_colors == 4
    best_profit, _ = solve_bcm_brute(bcm)
    assert best_profit == solve_brute_force(inst).objective


# ---------------------------------------------------------------------------
# budgeted matching -> assignment
# ---------------------------------------------------------------------------

def test_from_bcm_running_example_shape(figure1_bcm):
    inst, threshold = reduce_from_bcm(figure1_bcm, threshold=3.0)
    assert inst.m == 6                       # 3 right items + (5 - 2) fillers
    assert inst.metadata["phi"] == 17.0      # 1 + sum of profits
    assert inst.n == 5
    assert inst.type_sizes == (2, 3)
    assert inst.block_sizes == (3, 3)
    assert threshold == 3.0 + 17.0 * 3


def test_from_bcm_running_example_welfare(figure1_bcm):
    inst, _ = reduce_from_bcm(figure1_bcm, threshold=3.0)
    agent_of = inst.metadata["agent_of_edge"]
    # matching {(a1,b1), (a2,b2)}: those two take their right items, the
    # other three take filler items worth phi each
    pairs = [
        (agent_of[0], 0),   # (a1,b1) -> right item b1, profit 2
        (agent_of[3], 1),   # (a2,b2) -> right item b2, profit 1
        (agent_of[1], 3),   # (a1,b2) -> a1 filler
        (agent_of[2], 4),   # (a2,b1) -> a2 filler
        (agent_of[4], 5),   # (a2,b3) -> a2 filler
    ]
    asg = Assignment(pairs)
    assert welfare(inst, asg) == 2 + 1 + 3 * 17.0
    # with blue allowed twice in the right block, this assignment is feasible
    relaxed = Instance(inst.type_sizes, inst.block_sizes, inst.utilities,
                       np.array([[2, 3], [1, 3]]))
    assert check_feasible(relaxed, asg).ok


def test_from_bcm_single_edge():
    bcm = BCMInstance(1, 1, (BCMEdge(0, 0, 0, 5.0),), (1,))
    inst, threshold = reduce_from_bcm(bcm, threshold=5.0)
    assert inst.block_sizes == (1, 0)        # no filler items
    assert threshold == 5.0


def test_from_bcm_decision_equivalence_random():
    rng = np.random.default_rng(19)
    for _ in range(20):
        bcm = rand_bcm(rng)
        best_profit, _ = solve_bcm_brute(bcm)
        p = float(rng.integers(0, int(best_profit) + 3))
        inst, threshold = reduce_from_bcm(bcm, threshold=p)
        reduced_yes = solve_brute_force(inst).objective >= threshold - 1e-9
        assert reduced_yes == (best_profit >= p)


def test_from_bcm_requires_threshold():
    bcm = BCMInstance(1, 1, (BCMEdge(0, 0, 0, 1.0),), (1,))
    with pytest.raises(InputError):
        reduce_from_bcm(bcm)


def test_bcm_validates_vertex_and_color_ranges():
    with pytest.raises(InputError):
        BCMInstance(1, 1, (BCMEdge(2, 0, 0, 1.0),), (1,))
    with pytest.raises(InputError):
        BCMInstance(1, 1, (BCMEdge(0, 0, 3, 1.0),), (1,))


def test_bcm_json_round_trip(figure1_bcm):
    doc = figure1_bcm.to_json()
    back = BCMInstance.from_json(doc)
    assert back == figure1_bcm
