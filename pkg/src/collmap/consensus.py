"""Generic collective-computing round: a local rule composed with a network.

A *local rule* is any callable ``rule(own_state, neighbor_states, rng) ->
new_state`` that only looks at what it is handed. :func:`collective_round`
applies it to every agent against the round-start snapshot, so the outcome
does not depend on the order agents are processed in.

Randomness follows one protocol shared with :func:`collmap.swarm.vicsek_update`:
the round's generator spawns one child stream per agent, assigned in ascending
id order.
"""

from __future__ import annotations

import math
from typing import Callable, Mapping, Sequence, TypeVar

import numpy as np

from .errors import IdMismatch
from .netgraph import InteractionNetwork

S = TypeVar("S")
LocalRule = Callable[[S, Sequence[S], "np.random.Generator | None"], S]

TWO_PI = 2.0 * math.pi


def collective_round(
    states: Mapping[int, S],
    net: InteractionNetwork,
    rule: LocalRule,
    rng: np.random.Generator | None = None,
    order: Sequence[int] | None = None,
) -> dict[int, S]:
    ids = sorted(states)
    known = set(ids)
    for i, nbrs in net.out_neighbors.items():
        if i not in known or not known.issuperset(nbrs):
            raise IdMismatch(f"network references robot ids outside the state set (at {i})")
    streams = dict(zip(ids, rng.spawn(len(ids)))) if rng is not None else dict.fromkeys(ids)
    snapshot = dict(states)
    if order is None:
        order = ids
    elif sorted(order) != ids:
        raise IdMismatch("processing order must be a permutation of the state ids")
    out = {}
    for i in order:
        out[i] = rule(snapshot[i], [snapshot[j] for j in net.neighbors(i)], streams[i])
    return {i: out[i] for i in ids}


def wrap_angle(x: float) -> float:
    """Map into [-pi, pi); values already inside are returned untouched."""
    if -math.pi <= x < math.pi:
        return x
    w =(x + math.pi) % TWO_PI - math.pi
    return w - TWO_PI if w >= math.pi else w


def angle_diff(a: float, b: float) -> float:
    """Wrapped a - b in (-pi, pi]."""
    return math.pi - ((math.pi - (a - b)) % TWO_PI)


def draw_noise(rng: np.random.Generator, kind: str = "uniform") -> float:
    """One xi sample: uniform on [-pi, pi], or a standard normal truncated there."""
    if kind == "uniform":
        return float(rng.uniform(-math.pi, math.pi))
    if kind == "gaussian":
        while True:
            x = float(rng.standard_normal())
            if -math.pi <= x <= math.pi:
                return x
    raise ValueError(f"unknown noise kind {kind!r}")


def vicsek_rule(dt: float, eta: float, noise: str = "uniform") -> LocalRule:
    """Heading-alignment rule as a scalar local computation (state = heading)."""

    def rule(theta: float, neighbors: Sequence[float], rng) -> float:
        s = 0.0
        for other in neighbors:
            s += angle_diff(other, theta)
        new = theta + (dt / len(neighbors)) * s if neighbors else theta
        if eta:
            new = new + eta * draw_noise(rng, noise)
        return wrap_angle(new)

    return rule


def identity_rule(state, neighbors, rng):
    return state
