import numpy as np
import pytest

from quotamatch import BCMEdge, BCMInstance, Instance


def rand_instance(rng, max_group=3, max_groups=3, max_util=9, cap_hi=3):
    """Small random instance: k, l <= max_groups, group sizes <= max_group,
    integer utilities, random caps."""
    k = int(rng.integers(1, max_groups + 1))
    l = int(rng.integers(1, max_groups + 1))
    tsz = tuple(int(x) for x in rng.integers(0, max_group + 1, size=k))
    bsz = tuple(int(x) for x in rng.integers(0, max_group + 1, size=l))
    n, m = sum(tsz), sum(bsz)
    u = rng.integers(0, max_util + 1, size=(n, m)).astype(float)
    caps = rng.integers(0, cap_hi + 1, size=(k, l))
    return Instance(tsz, bsz, u, caps)


def type_uniform_instance(rng, n_max=30, m_max=30, max_util=9):
    k = int(rng.integers(1, 4))
    l = int(rng.integers(1, 4))
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    tsz = rng.multinomial(n, [1.0 / k] * k)
    bsz = rng.multinomial(m, [1.0 / l] * l)
    shared = rng.integers(0, max_util + 1, size=(k, m)).astype(float)
    u = np.repeat(shared, tsz, axis=0)
    caps = rng.integers(0, max(2, m // l + 2), size=(k, l))
    return Instance(tuple(int(x) for x in tsz), tuple(int(x) for x in bsz), u, caps)


def block_uniform_instance(rng, n_max=30, m_max=30, max_util=9):
    k = int(rng.integers(1, 4))
    l = int(rng.integers(1, 4))
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    tsz = rng.multinomial(n, [1.0 / k] * k)
    bsz = rng.multinomial(m, [1.0 / l] * l)
    shared = rng.integers(0, max_util + 1, size=(n, l)).astype(float)
    u = np.repeat(shared, bsz, axis=1)
    caps = rng.integers(0, max(2, m // l + 2), size=(k, l))
    return Instance(tuple(int(x) for x in tsz), tuple(int(x) for x in bsz), u, caps)


@pytest.fixture
def figure1_bcm() -> BCMInstance:
    """Two left vertices, three right, five edges in two colors; profits as
    drawn on the running example graph."""
    edges = (
        BCMEdge(0, 0, 0, 2.0),   # (a1, b1) blue
        BCMEdge(0, 1, 1, 6.0),   # (a1, b2) red
        BCMEdge(1, 0, 1, 3.0),   # (a2, b1) red
        BCMEdge(1, 1, 0, 1.0),   # (a2, b2) blue
        BCMEdge(1, 2, 1, 4.0),   # (a2, b3) red
    )
    return BCMInstance(num_left=2, num_right=3, edges=edges, budgets=(1, 2))
