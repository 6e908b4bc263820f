"""Interaction networks (k-NN, static chain, none) and robot-removal schedules."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import NoRobotsAlive, UnknownRobot
from .world import RobotState, seed_sequence


@dataclass(frozen=True)
class TopologySpec:
    kind: str  # "knn" | "chain" | "none"
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("knn", "chain", "none"):
            raise ValueError(f"unknown topology {self.kind!r}")
        if self.k < 0:
            raise ValueError("k must be non-negative")

    @classmethod
    def knn(cls, k: int) -> "TopologySpec":
        return cls("knn", k)

    @classmethod
    def chain(cls) -> "TopologySpec":
        return cls("chain")

    @classmethod
    def none(cls) -> "TopologySpec":
        return cls("none")

    @classmethod
    def parse(cls, text: str) -> "TopologySpec":
        """'none', 'chain', 'knn:3', '3nn' or a bare '3'."""
        t = text.strip().lower()
        if t in ("none", "0nn"):
            return cls.none()
        if t == "chain":
            return cls.chain()
        for prefix in ("knn:", "knn"):
            if t.startswith(prefix) and t[len(prefix):].isdigit():
                return cls.knn(int(t[len(prefix):]))
        if t.endswith("nn") and t[:-2].isdigit():
            return cls.knn(int(t[:-2]))
        if t.isdigit():
            return cls.knn(int(t))
        raise ValueError(f"cannot parse topology {text!r}")

    @property
    def label(self) -> str:
        if self.kind == "knn":
            return f"{self.k}NN"
        return "Chain" if self.kind == "chain" else "None"

    @property
    def isolated(self) -> bool:
        # KNN(0) and None both mean no interaction
        return self.kind == "none" or (self.kind == "knn" and self.k == 0)


@dataclass(frozen=True)
class InteractionNetwork:
    iteration: int
    out_neighbors: Mapping[int, tuple[int, ...]]

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.out_neighbors.get(i, ())

    @property
    def ids(self) -> list[int]:
        return sorted(self.out_neighbors)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in self.ids for j in self.out_neighbors[i]]

    def dump(self) -> str:
        """One line per robot: ``id: n1,n2,...``."""
        return "\n".join(f"{i}: " + ",".join(map(str, self.out_neighbors[i])) for i in self.ids)


def k_nearest_neighbors(robots: Sequence[RobotState], self_id: int, k: int) -> list[int]:
    """Ids of the ``k`` alive robots closest to ``self_id``; ties go to the lower id."""
    me = next((r for r in robots if r.id == self_id and r.alive), None)
    if me is None:
        raise UnknownRobot(self_id)
    r0, c0 = me.pos
    # squared integer distances keep ties exact
    ranked = sorted(
        ((r.pos[0] - r0) ** 2 + (r.pos[1] - c0) ** 2, r.id) for r in robots if r.alive and r.id != self_id
    )
    return [rid for _, rid in ranked[:k]]


def build_network(robots: Sequence[RobotState], spec: TopologySpec, iteration: int) -> InteractionNetwork:
    alive = sorted((r for r in robots if r.alive), key=lambda r: r.id)
    if not alive:
        raise NoRobotsAlive("cannot build a network without alive robots")
    ids = [r.id for r in alive]
    if spec.isolated or len(alive) == 1:
        adj = {i: () for i in ids}
    elif spec.kind == "chain":
        adj = {}
        for n, i in enumerate(ids):
            adj[i] = tuple(ids[m] for m in (n - 1, n + 1) if 0 <= m < len(ids))
    else:
        adj = _knn_all(alive, spec.k)
    return InteractionNetwork(iteration, adj)


def _knn_all(alive: list[RobotState], k: int) -> dict[int, tuple[int, ...]]:
    n = len(alive)
    k = min(k, n - 1)
    pos = np.array([r.pos for r in alive], dtype=np.int64)
    ids = np.array([r.id for r in alive], dtype=np.int64)
    d2 = ((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.iinfo(np.int64).max)
    adj = {}
    for a in range(n):
        order = np.lexsort((ids, d2[a]))[:k]
        adj[int(ids[a])] = tuple(int(ids[b]) for b in order)
    return adj


@dataclass(frozen=True)
class RemovalSchedule:
    interval: int
    count: int
    max_events: int
    mode: str = "lowest"  # "lowest" | "random"

    def __post_init__(self):
        if self.interval < 1 or self.count < 1 or self.max_events < 0:
            raise ValueError("interval and count must be positive, max_events non-negative")
        if self.mode not in ("lowest", "random"):
            raise ValueError(f"unknown removal mode {self.mode!r}")

    def fires_at(self, iteration: int) -> bool:
        return iteration % self.interval == 0 and 1 <= iteration // self.interval <= self.max_events


def apply_removals(
    robots: Sequence[RobotState], schedule: RemovalSchedule | None, iteration: int, seed: int = 0
) -> tuple[list[RobotState], list[int]]:
    """Kill robots at the schedule's firing points. At least one robot survives."""
    if iteration < 1:
        raise ValueError("iteration must be >= 1")
    robots = list(robots)
    if schedule is None or not schedule.fires_at(iteration):
        return robots, []
    alive = sorted(r.id for r in robots if r.alive)
    n = min(schedule.count, len(alive) - 1)
    if n <= 0:
        return robots, []
    if schedule.mode == "lowest":
        victims = alive[:n]
    else:
        rng = np.random.Generator(np.random.PCG64(seed_sequence(seed, iteration)))
        victims = sorted(int(v) for v in rng.choice(alive, size=n, replace=False))
    gone = set(victims)
    return [replace(r, alive=False, path=(), target=None) if r.id in gone else r for r in robots], victims
