import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quotamatch import (
    Assignment,
    DegenerateInputError,
    Instance,
    InputError,
    QuotaProfile,
    compute_pod,
    disparity_beta,
    make_tightness_instance,
    solve_unconstrained,
)
from quotamatch.pod import (
    bound_thm4,
    bound_thm5,
    effective_cap_bound,
    min_alpha_per_type,
    nominal_cap_bound,
)

from conftest import rand_instance

SG_QUOTAS = np.array([0.87, 0.25, 0.15])
SG_NU = np.array([0.741, 0.134, 0.125])


def test_pod_is_one_with_slack_caps():
    rng = np.random.default_rng(1)
    u = rng.random((4, 4))
    inst = Instance((2, 2), (2, 2), u, np.array([[2, 2], [2, 2]]))
    report = compute_pod(inst, "exact")
    assert report.pod == 1.0


def test_tightness_instance_quarter_quota():
    inst = make_tightness_instance((4,), (4,), np.array([[0.25]]), 0, 0)
    report = compute_pod(inst, "brute")
    assert report.pod == 4.0
    assert report.bound_thm4 == 4.0


def test_block_diagonal_example_ratio_is_group_size():
    # two types and two blocks of size three, unit caps everywhere
    mu = 3
    u = np.zeros((2 * mu, 2 * mu))
    u[:mu, :mu] = 1.0
    u[mu:, mu:] = 1.0
    inst = Instance((mu, mu), (mu, mu), u, np.ones((2, 2), dtype=int))
    report = compute_pod(inst, "exact")
    assert report.opt == 2 * mu
    assert report.opt_c == 2.0
    assert report.pod == mu


def test_pod_infinite_when_caps_kill_all_welfare():
    inst = Instance((1,), (1,), np.array([[5.0]]), np.array([[0]]))
    report = compute_pod(inst, "brute")
    assert math.isinf(report.pod)
    assert report.to_json()["pod"] == "inf"


def test_pod_one_when_everything_is_zero():
    inst = Instance((1,), (1,), np.array([[0.0]]), np.array([[1]]))
    report = compute_pod(inst, "brute")
    assert report.pod == 1.0


def test_nominal_bound_singapore_quotas():
    assert nominal_cap_bound(SG_QUOTAS) == pytest.approx(1 / 0.15, abs=1e-9)


def test_effective_bound_uniform_block_size_ten():
    prof = QuotaProfile(np.tile(SG_QUOTAS[:, None], (1, 1)))
    caps = prof.capacities_for([10])
    assert caps.reshape(-1).tolist() == [8, 2, 1]
    inst = Instance((10, 10, 10), (10,), np.zeros((30, 10)), caps, quotas=prof)
    assert effective_cap_bound(inst) == 10.0
    assert bound_thm4(inst, "nominal") == pytest.approx(1 / 0.15)
    assert bound_thm4(inst, "effective") == 10.0


def test_effective_bound_infinite_at_zero_cap():
    inst = Instance((2,), (2,), np.zeros((2, 2)), np.array([[0]]))
    assert math.isinf(bound_thm4(inst, "effective"))


def test_disparity_examples():
    # identical types: every ratio is one
    u = np.array([[1.0, 0.0], [0.0, 1.0]])
    inst = Instance((1, 1), (2,), u, np.array([[2], [2]]))
    beta, per_type = disparity_beta(inst, Assignment([(0, 0), (1, 1)]))
    assert beta == 1.0 and per_type.tolist() == [1.0, 1.0]


def test_disparity_two_equal_types_half():
    s = 3
    u = np.zeros((2 * s, 2 * s))
    u[0, 0] = 2.0
    u[s, 1] = 6.0
    inst = Instance((s, s), (2 * s,), u, np.array([[2 * s], [2 * s]]))
    beta, per_type = disparity_beta(inst, Assignment([(0, 0), (s, 1)]))
    assert beta == pytest.approx(0.5)
    assert per_type.tolist() == pytest.approx([0.5, 1.5])


def test_disparity_single_type_is_one():
    inst = Instance((2,), (2,), np.eye(2), np.array([[2]]))
    beta, _ = disparity_beta(inst, Assignment([(0, 0)]))
    assert beta == 1.0


def test_disparity_zero_welfare_is_degenerate():
    inst = Instance((1,), (1,), np.array([[0.0]]), np.array([[1]]))
    with pytest.raises(DegenerateInputError):
        disparity_beta(inst, Assignment([(0, 0)]))


def test_disparity_rejects_nonmatching():
    inst = Instance((2,), (2,), np.eye(2), np.array([[2]]))
    with pytest.raises(InputError):
        disparity_beta(inst, Assignment([(0, 0), (0, 1)]))


def test_bound_thm5_singapore_numbers():
    value = bound_thm5(1.0, SG_NU, SG_QUOTAS)
    assert value == pytest.approx(1.43, abs=0.01)
    assert bound_thm5(0.5, SG_NU, SG_QUOTAS) == pytest.approx(2 * value)


def test_bound_thm5_single_type():
    assert bound_thm5(0.8, np.array([1.0]), np.array([1.0])) == pytest.approx(1 / 0.8)


def test_bound_thm5_zero_denominator_is_infinite():
    assert math.isinf(bound_thm5(1.0, np.array([1.0]), np.array([0.0])))


def test_combined_bound_is_min():
    inst = make_tightness_instance((4,), (4,), np.array([[0.25]]), 0, 0)
    report = compute_pod(inst, "brute")
    assert report.bound_combined == min(report.bound_thm4, report.bound_thm5)


def test_tightness_preconditions():
    with pytest.raises(InputError):
        make_tightness_instance((2,), (4,), np.array([[0.25]]), 0, 0)
    with pytest.raises(InputError):  # designated pair must be the minimum
        make_tightness_instance((4, 4), (4, 4),
                                np.array([[0.5, 0.5], [0.5, 0.25]]), 0, 0)
    with pytest.raises(InputError):  # quota * size must be integral
        make_tightness_instance((4,), (4,), np.array([[0.3]]), 0, 0)


def test_tightness_other_values():
    inst = make_tightness_instance((5,), (5,), np.array([[0.2]]), 0, 0)
    report = compute_pod(inst, "brute")
    assert report.pod == 5.0
    one = make_tightness_instance((3,), (3,), np.array([[1.0]]), 0, 0)
    assert compute_pod(one, "brute").pod == 1.0


def test_pod_respects_both_bounds_on_random_instances():
    rng = np.random.default_rng(97)
    done = 0
    while done < 40:
        inst = rand_instance(rng)
        if inst.n == 0 or inst.m == 0 or inst.n > 6 or inst.m > 6:
            continue
        # all caps at least one so the constrained optimum keeps any welfare
        caps = np.maximum(inst.capacities, 1)
        inst = Instance(inst.type_sizes, inst.block_sizes, inst.utilities, caps)
        done += 1
        report = compute_pod(inst, "brute")
        assert report.pod >= 1.0 - 1e-12
        if not math.isinf(report.bound_thm4_effective):
            assert report.pod <= report.bound_thm4_effective + 1e-9
        if not math.isinf(report.bound_thm5):
            assert report.pod <= report.bound_thm5 + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.1, 100.0))
def test_beta_invariant_under_uniform_scaling(seed, scale):
    rng = np.random.default_rng(seed)
    inst = rand_instance(rng)
    if inst.n == 0 or inst.m == 0 or inst.utilities.max() == 0:
        return
    xstar = solve_unconstrained(inst).assignment
    if not xstar.pairs:
        return
    beta1, _ = disparity_beta(inst, xstar)
    scaled = Instance(inst.type_sizes, inst.block_sizes, inst.utilities * scale,
                      inst.capacities)
    beta2, _ = disparity_beta(scaled, xstar)
    assert beta1 == pytest.approx(beta2, rel=1e-9)


def test_report_hashes_and_mode():
    inst = make_tightness_instance((4,), (4,), np.array([[0.25]]), 0, 0)
    a = compute_pod(inst, "brute")
    b = compute_pod(inst, "brute")
    assert a.instance_hash == b.instance_hash
    assert a.xstar_hash == b.xstar_hash
    assert a.mode == "effective"


def test_min_alpha_per_type_modes():
    prof = QuotaProfile(np.array([[0.87, 0.87], [0.25, 0.25]]))
    caps = prof.capacities_for([10, 4])
    assert caps.tolist() == [[8, 3], [2, 1]]
    inst = Instance((5, 5), (10, 4), np.zeros((10, 14)), caps, quotas=prof)
    nominal = min_alpha_per_type(inst, "nominal")
    assert nominal.tolist() == [0.87, 0.25]
    effective = min_alpha_per_type(inst, "effective")
    assert effective.tolist() == [pytest.approx(3 / 4), pytest.approx(2 / 10)]
