"""Collective mapping loop and the heading-consensus demonstration.

Each call to :func:`step` is one synchronous round:

1. scheduled removals,
2. every alive robot senses,
3. the interaction network is rebuilt from current positions,
4. each robot writes its own reading plus its out-neighbours' readings
   (current round only) into its own map,
5. each robot picks the nearest frontier in its map, plans with A* and
   moves one cell.

Phases 2, 4 and 5 only read the phase-start snapshot, so robot processing
order is irrelevant.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .consensus import collective_round, draw_noise
from .errors import IdMismatch, NoRobotsAlive
from .netgraph import InteractionNetwork, RemovalSchedule, TopologySpec, apply_removals, build_network
from .occupancy import OccupancyGrid, known_union, merge_neighbor_readings
from .planning import astar, frontier_representatives, select_target
from .sensing import SensorReading, observe, sense
from .world import MOVES, CellCoord, Environment, RobotState, place_robots


@dataclass
class SimState:
    env: Environment
    robots: tuple[RobotState, ...]
    maps: dict[int, OccupancyGrid]
    topology: TopologySpec
    seed: int = 0
    schedule: RemovalSchedule | None = None
    occlusion: bool = True
    iteration: int = 0
    coverable: np.ndarray | None = None
    # "all": every map ever built counts toward coverage; "alive": survivors only
    coverage_scope: str = "all"
    network: InteractionNetwork | None = field(default=None, repr=False)
    stalled: bool = False

    def __post_init__(self):
        if self.coverable is None:
            self.coverable = coverable_cells(self.env, [r.pos for r in self.robots], self.occlusion)

    @property
    def alive(self) -> list[RobotState]:
        return [r for r in self.robots if r.alive]

    def robot(self, rid: int) -> RobotState:
        return next(r for r in self.robots if r.id == rid)

    def coverage_grids(self) -> list[OccupancyGrid]:
        if self.coverage_scope == "alive":
            return [self.maps[r.id] for r in self.robots if r.alive]
        return [self.maps[r.id] for r in self.robots]

    def covered_count(self) -> int:
        return int((known_union(self.coverage_grids(), self.env.shape) & self.coverable).sum())

    def coverage(self) -> float:
        total = int(self.coverable.sum())
        return self.covered_count() / total if total else 1.0


def make_state(
    env: Environment,
    n_robots: int,
    topology: TopologySpec,
    seed: int = 0,
    schedule: RemovalSchedule | None = None,
    occlusion: bool = True,
    coverage_scope: str = "all",
) -> SimState:
    robots = tuple(place_robots(env, n_robots, seed))
    maps = {r.id: OccupancyGrid.like(env) for r in robots}
    return SimState(env, robots, maps, topology, seed, schedule, occlusion, coverage_scope=coverage_scope)


def reachable_cells(env: Environment, starts) -> np.ndarray:
    """Flood fill (4-connected) over free cells from ``starts``."""
    h, w = env.shape
    seen = np.zeros((h, w), dtype=bool)
    queue = deque()
    for s in starts:
        if env.is_free(s) and not seen[s[0], s[1]]:
            seen[s[0], s[1]] = True
            queue.append((s[0], s[1]))
    blocked = env.blocked
    while queue:
        r, c = queue.popleft()
        for dr, dc in MOVES:
            nr, nc = r + dr, c + dc
            if not blocked[nr, nc] and not seen[nr, nc]:
                seen[nr, nc] = True
                queue.append((nr, nc))
    return seen


def coverable_cells(env: Environment, starts, occlusion: bool = True, mode: str = "boundary") -> np.ndarray:
    """Cells the swarm is expected to map before a run counts as complete.

    ``"boundary"`` (default): reachable free cells plus the obstacle cells
    4-adjacent to them. Frontier exploration is guaranteed to reveal all of
    these. ``"sensor"``: every cell the sensor sees from at least one
    reachable cell; this includes wall pockets that only a few positions can
    see, which exploration has no reason to visit.
    """
    reach = reachable_cells(env, starts)
    if mode == "boundary":
        mask = reach.copy()
        mask[1:] |= reach[:-1]
        mask[:-1] |= reach[1:]
        mask[:, 1:] |= reach[:, :-1]
        mask[:, :-1] |= reach[:, 1:]
        return mask
    if mode != "sensor":
        raise ValueError(f"unknown coverable mode {mode!r}")
    mask = np.zeros(env.shape, dtype=bool)
    for r, c in np.argwhere(reach):
        rows, cols, _ = observe(env, (int(r), int(c)), occlusion)
        mask[rows, cols] = True
    return mask


def plan_move(grid: OccupancyGrid, robot: RobotState) -> RobotState:
    """Choose a frontier target on ``grid`` and advance one cell toward it."""
    target = select_target(frontier_representatives(grid), robot)
    if target is None:
        return replace(robot, target=None, path=())
    path = astar(grid, robot.pos, target)
    if not path:
        return replace(robot, target=target, path=())
    return replace(robot, pos=path[0], target=target, path=tuple(path[1:]))


def step(state: SimState, order: Sequence[int] | None = None) -> SimState:
    """Advance one round. ``order`` permutes robot processing (it must not matter)."""
    t = state.iteration + 1
    robots = list(state.robots)
    if state.schedule is not None:
        robots, _ = apply_removals(robots, state.schedule, t, state.seed)
    by_id = {r.id: r for r in robots}
    alive_ids = sorted(r.id for r in robots if r.alive)
    if not alive_ids:
        raise NoRobotsAlive("no robot left to step")
    if order is None:
        order = alive_ids
    else:
        order = [i for i in order if by_id[i].alive]
        if sorted(order) != alive_ids:
            raise IdMismatch("order must cover every alive robot exactly once")

    readings = {i: sense(state.env, by_id[i], t, state.occlusion) for i in order}
    net = build_network(robots, state.topology, t)

    maps = dict(state.maps)
    for i in order:
        shared = [readings[i]] + [readings[j] for j in net.neighbors(i)]
        maps[i] = merge_neighbor_readings(state.maps[i], shared, t)

    moved = False
    changed = False
    for i in order:
        new = plan_move(maps[i], by_id[i])
        moved |= new.pos != by_id[i].pos
        changed |= not np.array_equal(maps[i].prob, state.maps[i].prob)
        by_id[i] = new

    pending = state.schedule is not None and t < state.schedule.interval * state.schedule.max_events
    return replace(
        state,
        robots=tuple(by_id[r.id] for r in robots),
        maps=maps,
        iteration=t,
        network=net,
        stalled=not (moved or changed or pending),
    )


class MetricsRecord(NamedTuple):
    run_id: int
    iteration: int
    coverage: float
    alive: int
    per_robot_coverage: tuple[float, ...] = ()


def record(state: SimState, run_id: int = 0) -> MetricsRecord:
    total = int(state.coverable.sum()) or 1
    per_robot = tuple(
        float((state.maps[r.id].known() & state.coverable).sum()) / total for r in state.robots
    )
    return MetricsRecord(run_id, state.iteration, state.coverage(), len(state.alive), per_robot)


def run(
    state: SimState, max_iterations: int, run_id: int = 0, on_step=None
) -> tuple[list[MetricsRecord], SimState]:
    """Step until the coverable cells are all known or ``max_iterations`` rounds pass.

    A swarm that reaches a fixed point (nobody moves, no map changes, no
    removal pending) can never finish; the run ends early with
    ``state.stalled`` set.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    records = []
    for _ in range(max_iterations):
        state = step(state)
        rec = record(state, run_id)
        if __debug__:
            check_invariants(state, records[-1].coverage if records else 0.0, rec.coverage)
        records.append(rec)
        if on_step is not None:
            on_step(state, rec)
        if rec.coverage >= 1.0 or state.stalled:
            break
    return records, state


def check_invariants(state: SimState, before: float, after: float) -> None:
    """Coverage never drops and no map disagrees with the ground truth."""
    if after < before:
        raise AssertionError(f"coverage fell from {before} to {after} at iteration {state.iteration}")
    truth = state.env.blocked
    for rid, g in state.maps.items():
        known = g.known()
        if not np.array_equal(g.prob[known] == 1.0, truth[known]):
            raise AssertionError(f"robot {rid} map contradicts the environment at iteration {state.iteration}")


def completed(records: Sequence[MetricsRecord]) -> bool:
    return bool(records) and records[-1].coverage >= 1.0


class MappingAgent(NamedTuple):
    """Agent state for running phases 4-5 through :func:`collective_round`."""

    robot: RobotState
    grid: OccupancyGrid
    reading: SensorReading


def mapping_rule(own: MappingAgent, neighbors: Sequence[MappingAgent], rng=None) -> MappingAgent:
    # only the neighbours' current readings cross the link, never their maps
    grid = merge_neighbor_readings(own.grid, [own.reading] + [n.reading for n in neighbors], own.reading.iteration)
    return MappingAgent(plan_move(grid, own.robot), grid, own.reading)


def step_via_rounds(state: SimState) -> SimState:
    """Same round as :func:`step`, expressed as one :func:`collective_round`."""
    t = state.iteration + 1
    robots = list(state.robots)
    if state.schedule is not None:
        robots, _ = apply_removals(robots, state.schedule, t, state.seed)
    alive = [r for r in robots if r.alive]
    if not alive:
        raise NoRobotsAlive("no robot left to step")
    net = build_network(robots, state.topology, t)
    agents = {r.id: MappingAgent(r, state.maps[r.id], sense(state.env, r, t, state.occlusion)) for r in alive}
    out = collective_round(agents, net, mapping_rule)
    maps = dict(state.maps)
    maps.update({i: a.grid for i, a in out.items()})
    new_robots = tuple(out[r.id].robot if r.id in out else r for r in robots)
    return replace(state, robots=new_robots, maps=maps, iteration=t, network=net)


@dataclass(frozen=True)
class HeadingVector:
    ids: tuple[int, ...]
    headings: tuple[float, ...]

    def __post_init__(self):
        if len(self.ids) != len(self.headings):
            raise ValueError("one heading per id")

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.ids, self.headings))

    def disagreement(self) -> float:
        """Largest pairwise wrapped heading difference."""
        th = np.array(self.headings)
        d = np.abs(_wrap_diff(th[:, None], th[None, :]))
        return float(d.max()) if len(th) else 0.0


def _wrap_diff(a, b):
    return math.pi - np.mod(math.pi - (a - b), 2 * math.pi)


def _wrap(x):
    inside = (x >= -math.pi) & (x < math.pi)
    w = np.mod(x + math.pi, 2 * math.pi) - math.pi
    w = np.where(w >= math.pi, w - 2 * math.pi, w)
    return np.where(inside, x, w)


def vicsek_update(
    h: HeadingVector,
    net: InteractionNetwork,
    dt: float,
    eta: float,
    rng: np.random.Generator | None = None,
    noise: str = "uniform",
) -> HeadingVector:
    """theta_i += dt/k_i * sum_j wrap(theta_j - theta_i) + eta * xi_i, then wrap."""
    order = sorted(range(len(h.ids)), key=lambda n: h.ids[n])
    ids = [h.ids[n] for n in order]
    index = {i: n for n, i in enumerate(ids)}
    for i, nbrs in net.out_neighbors.items():
        if i not in index or any(j not in index for j in nbrs):
            raise IdMismatch(f"network and heading vector disagree on ids (at {i})")
    theta = np.array([h.headings[n] for n in order], dtype=float)
    n = len(ids)
    nbr_lists = [net.neighbors(i) for i in ids]
    kmax = max((len(x) for x in nbr_lists), default=0)
    cols = np.zeros((n, kmax), dtype=np.intp)
    mask = np.zeros((n, kmax), dtype=bool)
    for a, nbrs in enumerate(nbr_lists):
        cols[a, : len(nbrs)] = [index[j] for j in nbrs]
        mask[a, : len(nbrs)] = True
    # column-wise accumulation keeps each agent's sum in neighbour-list order
    s = np.zeros(n)
    for c in range(kmax):
        d = _wrap_diff(theta[cols[:, c]], theta)
        s = np.where(mask[:, c], s + d, s)
    k = mask.sum(axis=1)
    new = np.where(k > 0, theta + (dt / np.maximum(k, 1)) * s, theta)
    streams = rng.spawn(n) if rng is not None else [None] * n
    if eta:
        xi = np.array([draw_noise(g, noise) for g in streams])
        new = new + eta * xi
    new = _wrap(new)
    return HeadingVector(tuple(ids), tuple(float(x) for x in new))
