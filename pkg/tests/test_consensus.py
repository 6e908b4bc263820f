import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collmap.consensus import angle_diff, collective_round, identity_rule, vicsek_rule, wrap_angle
from collmap.errors import IdMismatch
from collmap.netgraph import InteractionNetwork, TopologySpec, build_network
from collmap.swarm import HeadingVector, vicsek_update
from collmap.world import CellCoord, RobotState


def empty_net(ids):
    return InteractionNetwork(0, {i: () for i in ids})


def test_empty_network_zero_neighbours():
    seen = {}

    def rule(state, nbrs, rng):
        seen[state] = list(nbrs)
        return state + 1

    out = collective_round({0: 10, 1: 20}, empty_net([0, 1]), rule)
    assert out == {0: 11, 1: 21}
    assert seen == {10: [], 20: []}


def test_identity_rule():
    states = {3: "a", 1: "b", 7: "c"}
    net = InteractionNetwork(0, {1: (3, 7), 3: (1,), 7: ()})
    assert collective_round(states, net, identity_rule) == states


def test_snapshot_semantics():
    # each agent takes the sum of neighbours; a sequential update would leak
    states = {0: 1, 1: 2, 2: 3}
    net = InteractionNetwork(0, {0: (1,), 1: (2,), 2: (0,)})

    def rule(state, nbrs, rng):
        return sum(nbrs)

    expected = {0: 2, 1: 3, 2: 1}
    for order in ([0, 1, 2], [2, 1, 0], [1, 0, 2]):
        assert collective_round(states, net, rule, order=order) == expected


def test_id_mismatch():
    with pytest.raises(IdMismatch):
        collective_round({0: 1}, InteractionNetwork(0, {0: (5,)}), identity_rule)
    with pytest.raises(IdMismatch):
        collective_round({0: 1, 1: 2}, empty_net([0, 1]), identity_rule, order=[0])


@pytest.mark.parametrize("x", [0.0, 1.0, -math.pi, math.pi, 3 * math.pi + 0.2, -7.5, 100.0])
def test_wrap_angle_range(x):
    w = wrap_angle(x)
    assert -math.pi <= w < math.pi
    assert math.isclose(math.cos(w), math.cos(x), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(x), abs_tol=1e-9)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_angle_diff_range(a, b):
    d = angle_diff(a, b)
    assert -math.pi < d <= math.pi + 1e-12
    assert math.isclose(math.cos(d), math.cos(a - b), abs_tol=1e-9)


def random_positions(rng, n):
    return [RobotState(i, CellCoord(*map(int, rng.integers(0, 30, 2)))) for i in range(n)]


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32),
    n=st.integers(1, 10),
    k=st.integers(0, 4),
    eta=st.sampled_from([0.0, 0.1, 0.5]),
    dt=st.sampled_from([0.1, 0.25, 0.5]),
    noise=st.sampled_from(["uniform", "gaussian"]),
)
def test_round_with_heading_rule_equals_vicsek_update(seed, n, k, eta, dt, noise):
    rng = np.random.default_rng(seed)
    robots = random_positions(rng, n)
    net = build_network(robots, TopologySpec.knn(k), 0)
    ids = tuple(int(i) for i in rng.permutation(n))
    headings = tuple(float(x) for x in rng.uniform(-math.pi, math.pi, n))
    h = HeadingVector(ids, headings)
    a = vicsek_update(h, net, dt, eta, rng=np.random.default_rng(seed + 1), noise=noise)
    b = collective_round(h.as_dict(), net, vicsek_rule(dt, eta, noise), rng=np.random.default_rng(seed + 1))
    assert a.as_dict() == b


def test_rule_fixed_point_exact():
    rule = vicsek_rule(0.1, 0.0)
    assert rule(0.7, [0.7, 0.7], None) == 0.7
    assert rule(-0.2, [], None) == -0.2
