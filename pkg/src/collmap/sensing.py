"""Simulated IR sensor: a 6x7 tile the robot sees, optionally with wall occlusion."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property

import numpy as np

from .errors import DeadRobot
from .world import CellCoord, Environment, RobotState

# Tile offsets relative to the robot: 6 rows (-3..+2) by 7 columns (-3..+3).
TILE_ROWS = range(-3, 3)
TILE_COLS = range(-3, 4)
TILE_SIZE = len(TILE_ROWS) * len(TILE_COLS)


class Label(IntEnum):
    FREE = 0
    OCCUPIED = 1


def ray_offsets(dr: int, dc: int) -> list[tuple[int, int]]:
    """Bresenham cells from (0, 0) to (dr, dc), both endpoints included.

    Steps along the major axis; the minor coordinate is the exact rational
    value rounded half up, so the line is fully determined by the endpoints.
    """
    n = max(abs(dr), abs(dc))
    if n == 0:
        return [(0, 0)]
    if abs(dc) >= abs(dr):
        return [((2 * i * dr + n) // (2 * n), i if dc > 0 else -i) for i in range(n + 1)]
    return [(i if dr > 0 else -i, (2 * i * dc + n) // (2 * n)) for i in range(n + 1)]


_RAYS = {(dr, dc): ray_offsets(dr, dc) for dr in TILE_ROWS for dc in TILE_COLS}


@dataclass(frozen=True, eq=False)
class SensorReading:
    """One robot's observation for one round, stored column-wise.

    ``observations`` gives the set-of-pairs view; the arrays are what the
    occupancy update consumes.
    """

    robot_id: int
    iteration: int
    rows: np.ndarray
    cols: np.ndarray
    occupied: np.ndarray

    @classmethod
    def from_observations(cls, robot_id: int, iteration: int, observations) -> "SensorReading":
        obs: dict[CellCoord, Label] = {}
        for cell, label in observations:
            cell = CellCoord(*cell)
            if cell in obs and obs[cell] != label:
                raise ValueError(f"conflicting labels for {cell}")
            obs[cell] = Label(label)
        items = sorted(obs.items())
        rows = np.array([c.row for c, _ in items], dtype=np.intp)
        cols = np.array([c.col for c, _ in items], dtype=np.intp)
        occ = np.array([lab == Label.OCCUPIED for _, lab in items], dtype=bool)
        return cls(robot_id, iteration, rows, cols, occ)

    @cached_property
    def observations(self) -> frozenset[tuple[CellCoord, Label]]:
        return frozenset(
            (CellCoord(int(r), int(c)), Label.OCCUPIED if o else Label.FREE)
            for r, c, o in zip(self.rows, self.cols, self.occupied)
        )

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        if not isinstance(other, SensorReading):
            return NotImplemented
        return (self.robot_id, self.iteration) == (other.robot_id, other.iteration) and (
            self.observations == other.observations
        )

    __hash__ = None


def _visible(env: Environment, pos: CellCoord, occlusion: bool):
    blocked = env.blocked
    h, w = blocked.shape
    seen: dict[tuple[int, int], bool] = {}
    r0, c0 = pos
    for (dr, dc), ray in _RAYS.items():
        r, c = r0 + dr, c0 + dc
        if not (0 <= r < h and 0 <= c < w):
            continue
        if not occlusion:
            seen[(r, c)] = bool(blocked[r, c])
            continue
        # an obstacle strictly inside the ray hides the endpoint but is seen itself
        for rr, cc in ray[1:-1]:
            if blocked[r0 + rr, c0 + cc]:
                seen[(r0 + rr, c0 + cc)] = True
                break
        else:
            seen[(r, c)] = bool(blocked[r, c])
    items = sorted(seen.items())
    rows = np.array([k[0] for k, _ in items], dtype=np.intp)
    cols = np.array([k[1] for k, _ in items], dtype=np.intp)
    occ = np.array([v for _, v in items], dtype=bool)
    for a in (rows, cols, occ):
        a.setflags(write=False)
    return rows, cols, occ


def observe(env: Environment, pos, occlusion: bool = True):
    """(rows, cols, occupied) arrays seen from ``pos``; memoised per environment."""
    cache = env.__dict__.setdefault("_sense_cache", {})
    key = (pos[0], pos[1], occlusion)
    hit = cache.get(key)
    if hit is None:
        hit = cache[key] = _visible(env, CellCoord(*pos), occlusion)
    return hit


def sense(env: Environment, robot: RobotState, iteration: int, occlusion: bool = True) -> SensorReading:
    if not robot.alive:
        raise DeadRobot(f"robot {robot.id} is not alive")
    rows, cols, occ = observe(env, robot.pos, occlusion)
    return SensorReading(robot.id, iteration, rows, cols, occ)
