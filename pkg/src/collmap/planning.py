"""Frontier detection, target selection and A* on a robot's local map."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .errors import StartOccupied
from .occupancy import UNKNOWN, OccupancyGrid
from .world import CellCoord, RobotState

_CROSS = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class Frontier:
    cells: frozenset[CellCoord]
    representative: CellCoord


def frontier_mask(grid: OccupancyGrid) -> np.ndarray:
    """Free cells with at least one 4-neighbour still unknown."""
    unknown = grid.prob == UNKNOWN
    near = np.zeros_like(unknown)
    near[1:] |= unknown[:-1]
    near[:-1] |= unknown[1:]
    near[:, 1:] |= unknown[:, :-1]
    near[:, :-1] |= unknown[:, 1:]
    return (grid.prob < UNKNOWN) & near


def _frontier_arrays(grid: OccupancyGrid):
    mask = frontier_mask(grid)
    labels, n = ndimage.label(mask, structure=_CROSS)
    if n == 0:
        return None
    rows, cols = np.nonzero(labels)  # row-major
    lab = labels[rows, cols] - 1
    cnt = np.bincount(lab, minlength=n)
    sr = np.bincount(lab, weights=rows, minlength=n).astype(np.int64)
    sc = np.bincount(lab, weights=cols, minlength=n).astype(np.int64)
    # distance to the centroid scaled by component size: exact integer ties
    d2 = (cnt[lab] * rows - sr[lab]) ** 2 + (cnt[lab] * cols - sc[lab]) ** 2
    order = np.lexsort((np.arange(len(rows)), d2, lab))
    first = order[np.r_[True, lab[order][1:] != lab[order][:-1]]]
    reps = np.stack([rows[first], cols[first]], axis=1)  # indexed by label
    return rows, cols, lab, reps


def frontier_representatives(grid: OccupancyGrid) -> list[CellCoord]:
    """Representatives only, row-major; the fast path used by the simulator."""
    arrs = _frontier_arrays(grid)
    if arrs is None:
        return []
    return sorted(CellCoord(int(r), int(c)) for r, c in arrs[3])


def detect_frontiers(grid: OccupancyGrid) -> list[Frontier]:
    arrs = _frontier_arrays(grid)
    if arrs is None:
        return []
    rows, cols, lab, reps = arrs
    members: list[list[CellCoord]] = [[] for _ in range(len(reps))]
    for r, c, l in zip(rows.tolist(), cols.tolist(), lab.tolist()):
        members[l].append(CellCoord(r, c))
    out = [Frontier(frozenset(m), CellCoord(int(reps[l][0]), int(reps[l][1]))) for l, m in enumerate(members)]
    out.sort(key=lambda f: f.representative)
    return out


def _dist2(a, b) -> int:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def select_target(frontiers: Sequence, robot: RobotState) -> CellCoord | None:
    """Nearest representative (Euclidean), ties by row-major order.

    Accepts :class:`Frontier` objects or bare representative cells.
    """
    if not frontiers:
        return None
    reps = [f.representative if isinstance(f, Frontier) else CellCoord(*f) for f in frontiers]
    return min(reps, key=lambda c: (_dist2(c, robot.pos), c))


def astar(grid: OccupancyGrid, start, goal) -> list[CellCoord] | None:
    """Shortest 4-connected path from ``start`` to ``goal``, excluding ``start``.

    Free and unknown cells are traversable, occupied ones are not. Unit step
    cost with a Manhattan heuristic; equal f-scores pop the lower h first,
    then the lower row-major index. Returns None if the goal is unreachable.
    """
    h, w = grid.shape
    sr, sc = start
    gr, gc = goal
    prob = grid.prob
    if prob[sr, sc] > UNKNOWN:
        raise StartOccupied(f"start {tuple(start)} is occupied")
    if (sr, sc) == (gr, gc):
        return []
    if prob[gr, gc] > UNKNOWN:
        return None
    passable = (prob <= UNKNOWN).ravel().tolist()
    s = sr * w + sc
    t = gr * w + gc
    g = {s: 0}
    parent = {}
    closed = set()
    h0 = abs(sr - gr) + abs(sc - gc)
    heap = [(h0, h0, s)]
    while heap:
        f, hh, u = heapq.heappop(heap)
        if u in closed:
            continue
        if u == t:
            path = []
            while u != s:
                path.append(CellCoord(u // w, u % w))
                u = parent[u]
            path.reverse()
            return path
        closed.add(u)
        ur, uc = divmod(u, w)
        gu = g[u] + 1
        for v, vr, vc in (
            (u - w, ur - 1, uc),
            (u - 1, ur, uc - 1),
            (u + 1, ur, uc + 1),
            (u + w, ur + 1, uc),
        ):
            if vr < 0 or vr >= h or vc < 0 or vc >= w or not passable[v] or v in closed:
                continue
            if gu < g.get(v, 1 << 60):
                g[v] = gu
                parent[v] = u
                hv = abs(vr - gr) + abs(vc - gc)
                heapq.heappush(heap, (gu + hv, hv, v))
    return None
