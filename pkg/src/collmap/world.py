"""Ground-truth environment, ASCII map files and initial robot placement.

Map text uses one character per cell::

    #   obstacle
    .   free
    S   free cell that is also a spawn point (collected row-major)

The world must be closed: every border cell is ``#``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import EmptyMap, IllegalChar, OpenBoundary, RaggedMap, TooManyRobots

# 4-connected moves, in the fixed order used everywhere a neighbour scan happens
MOVES = ((-1, 0), (0, -1), (0, 1), (1, 0))

SEED_MASK = (1 << 64) - 1


class CellCoord(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True, eq=False)
class Environment:
    """Immutable occupancy ground truth. ``blocked[r, c]`` is True for obstacles."""

    blocked: np.ndarray
    spawns: tuple[CellCoord, ...] = ()

    def __post_init__(self):
        arr = np.array(self.blocked, dtype=bool)
        arr.setflags(write=False)
        object.__setattr__(self, "blocked", arr)
        object.__setattr__(self, "spawns", tuple(CellCoord(*s) for s in self.spawns))
        h, w = arr.shape
        if h < 3 or w < 3:
            raise EmptyMap(f"map must be at least 3x3, got {h}x{w}")
        border = np.concatenate([arr[0], arr[-1], arr[:, 0], arr[:, -1]])
        if not border.all():
            raise OpenBoundary("every border cell must be an obstacle")
        if len(set(self.spawns)) != len(self.spawns):
            raise ValueError("duplicate spawn points")
        for s in self.spawns:
            if not self.in_bounds(s) or arr[s]:
                raise ValueError(f"spawn {s} is not a free cell")

    @property
    def height(self) -> int:
        return self.blocked.shape[0]

    @property
    def width(self) -> int:
        return self.blocked.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.blocked.shape

    def in_bounds(self, c) -> bool:
        return 0 <= c[0] < self.height and 0 <= c[1] < self.width

    def is_free(self, c) -> bool:
        return self.in_bounds(c) and not self.blocked[c[0], c[1]]

    def free_cells(self) -> list[CellCoord]:
        """All free cells in row-major order."""
        return [CellCoord(int(r), int(c)) for r, c in np.argwhere(~self.blocked)]

    def __eq__(self, other):
        if not isinstance(other, Environment):
            return NotImplemented
        return self.spawns == other.spawns and np.array_equal(self.blocked, other.blocked)

    def __hash__(self):
        return hash((self.blocked.shape, self.blocked.tobytes(), self.spawns))


def load_environment(source: str) -> Environment:
    lines = source.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in lines]
    if not lines or not any(lines):
        raise EmptyMap("map text is empty")
    width = len(lines[0])
    for i, ln in enumerate(lines):
        if len(ln) != width:
            raise RaggedMap(f"line {i} has length {len(ln)}, expected {width}")
    h = len(lines)
    blocked = np.zeros((h, width), dtype=bool)
    spawns = []
    for r, ln in enumerate(lines):
        for c, ch in enumerate(ln):
            if ch == "#":
                blocked[r, c] = True
            elif ch == "S":
                spawns.append(CellCoord(r, c))
            elif ch != ".":
                raise IllegalChar(f"illegal character {ch!r} at ({r},{c})")
    on_border = lambda s: s.row in (0, h - 1) or s.col in (0, width - 1)  # noqa: E731
    if any(on_border(s) for s in spawns):
        raise OpenBoundary("spawn point on the border")
    return Environment(blocked, tuple(spawns))


def dump_environment(env: Environment) -> str:
    rows = [["#" if b else "." for b in row] for row in env.blocked]
    for s in env.spawns:
        rows[s.row][s.col] = "S"
    return "\n".join("".join(r) for r in rows)


def read_map(path) -> Environment:
    return load_environment(Path(path).read_text(encoding="utf-8"))


def bundled_map(name: str) -> Environment:
    """Load one of the maps shipped in ``collmap/maps`` (``test20``, ``basilica``)."""
    text = resources.files("collmap").joinpath("maps").joinpath(f"{name}.map").read_text(encoding="utf-8")
    return load_environment(text)


def bundled_map_path(name: str) -> Path:
    return Path(str(resources.files("collmap").joinpath("maps").joinpath(f"{name}.map")))


@dataclass(frozen=True)
class RobotState:
    id: int
    pos: CellCoord
    alive: bool = True
    target: CellCoord | None = None
    path: tuple[CellCoord, ...] = ()
    heading: float = 0.0


def seed_sequence(seed: int, *extra: int) -> np.random.SeedSequence:
    """PCG64 seeding entry point; 64-bit seeds (negative ones wrap)."""
    return np.random.SeedSequence([seed & SEED_MASK, *extra])


def place_robots(env: Environment, n: int, seed: int) -> list[RobotState]:
    """Place ``n`` robots: first ``n`` spawns if the map has enough, else seeded draws.

    Positions are a prefix of a PCG64 permutation of the free cells, so for a
    fixed seed smaller swarms are subsets of larger ones. Robot ``i`` draws its
    heading from its own child stream.
    """
    if n < 1:
        raise ValueError("n must be positive")
    free = env.free_cells()
    if n > len(free):
        raise TooManyRobots(f"{n} robots but only {len(free)} free cells")
    root = seed_sequence(seed)
    place_ss, *robot_ss = root.spawn(n + 1)
    if len(env.spawns) >= n:
        cells = list(env.spawns[:n])
    else:
        # prefix of one seeded permutation: the n-robot deployment is nested in the (n+1)-robot one
        picks = np.random.Generator(np.random.PCG64(place_ss)).permutation(len(free))[:n]
        cells = [free[int(i)] for i in picks]
    robots = []
    for i, (cell, ss) in enumerate(zip(cells, robot_ss)):
        heading = np.random.Generator(np.random.PCG64(ss)).uniform(-math.pi, math.pi)
        robots.append(RobotState(id=i, pos=cell, heading=float(heading)))
    return robots
