"""Per-robot occupancy grids and the union-coverage metric.

Sensing is perfect, so an observation saturates a cell to 0 (free) or 1
(occupied); 0.5 means never observed.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, StaleReading
from .sensing import SensorReading
from .world import Environment

UNKNOWN = 0.5


class CellClass(Enum):
    UNKNOWN = "?"
    FREE = "."
    OCCUPIED = "#"


class OccupancyGrid:
    """Probability-of-obstacle field for one robot's local map."""

    __slots__ = ("prob",)

    def __init__(self, height: int, width: int, prob: np.ndarray | None = None):
        if prob is None:
            prob = np.full((height, width), UNKNOWN)
        elif prob.shape != (height, width):
            raise DimensionMismatch(f"prob has shape {prob.shape}, expected {(height, width)}")
        self.prob = prob

    @classmethod
    def like(cls, env: Environment) -> "OccupancyGrid":
        return cls(env.height, env.width)

    @property
    def height(self) -> int:
        return self.prob.shape[0]

    @property
    def width(self) -> int:
        return self.prob.shape[1]

    @property
    def shape(self):
        return self.prob.shape

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(self.height, self.width, self.prob.copy())

    def known(self) -> np.ndarray:
        return self.prob != UNKNOWN

    def free(self) -> np.ndarray:
        return self.prob < UNKNOWN

    def occupied(self) -> np.ndarray:
        return self.prob > UNKNOWN

    def classify(self, cell) -> CellClass:
        p = self.prob[cell[0], cell[1]]
        if p == UNKNOWN:
            return CellClass.UNKNOWN
        return CellClass.FREE if p < UNKNOWN else CellClass.OCCUPIED

    def write(self, reading: SensorReading) -> None:
        """In-place saturation write of one reading."""
        self.prob[reading.rows, reading.cols] = reading.occupied

    def __eq__(self, other):
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return np.array_equal(self.prob, other.prob)

    __hash__ = None

    def __repr__(self):
        return f"OccupancyGrid({self.height}x{self.width}, known={int(self.known().sum())})"


def update_occupancy(grid: OccupancyGrid, reading: SensorReading) -> OccupancyGrid:
    out = grid.copy()
    out.write(reading)
    return out


def merge_neighbor_readings(
    grid: OccupancyGrid, readings: Iterable[SensorReading], iteration: int | None = None
) -> OccupancyGrid:
    """Fold the current round's readings into ``grid``.

    Only readings stamped with ``iteration`` are accepted; when ``iteration``
    is omitted the first reading's stamp defines the round. Anything older is
    a history share and raises :class:`StaleReading`.
    """
    readings = list(readings)
    if iteration is None and readings:
        iteration = readings[0].iteration
    for rd in readings:
        if rd.iteration != iteration:
            raise StaleReading(
                f"reading from robot {rd.robot_id} is stamped {rd.iteration}, current round is {iteration}"
            )
    out = grid.copy()
    for rd in readings:
        out.write(rd)
    return out


def known_union(grids: Sequence[OccupancyGrid], shape) -> np.ndarray:
    union = np.zeros(shape, dtype=bool)
    for g in grids:
        if g.shape != tuple(shape):
            raise DimensionMismatch(f"grid {g.shape} vs environment {tuple(shape)}")
        union |= g.known()
    return union


def coverage(grids: Sequence[OccupancyGrid], env: Environment, within: np.ndarray | None = None) -> float:
    """Fraction of cells known to at least one grid.

    ``within`` restricts both numerator and denominator to a boolean mask
    (the simulator passes the coverable cells).
    """
    union = known_union(grids, env.shape)
    if within is None:
        return float(union.sum()) / union.size
    total = int(within.sum())
    if total == 0:
        return 1.0
    return float((union & within).sum()) / total


def render_grid(grid: OccupancyGrid) -> str:
    """Text snapshot: '?' unknown, '.' free, '#' occupied, one line per row."""
    chars = np.full(grid.shape, "?", dtype="<U1")
    chars[grid.free()] = "."
    chars[grid.occupied()] = "#"
    return "\n".join("".join(row) for row in chars)


def parse_grid(text: str) -> OccupancyGrid:
    lines = [ln for ln in text.split("\n") if ln]
    values = {"?": UNKNOWN, ".": 0.0, "#": 1.0}
    try:
        prob = np.array([[values[ch] for ch in ln] for ln in lines], dtype=float)
    except KeyError as exc:
        raise ValueError(f"illegal grid character {exc.args[0]!r}") from None
    except ValueError:
        raise DimensionMismatch("ragged grid snapshot") from None
    return OccupancyGrid(*prob.shape, prob=prob)
