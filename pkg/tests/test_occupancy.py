import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collmap.errors import DimensionMismatch, StaleReading
from collmap.occupancy import (
    UNKNOWN,
    CellClass,
    OccupancyGrid,
    coverage,
    merge_neighbor_readings,
    parse_grid,
    render_grid,
    update_occupancy,
)
from collmap.sensing import Label, SensorReading, sense
from collmap.world import CellCoord, RobotState, bundled_map, load_environment

ROOM = "\n".join(["#" * 12] + ["#" + "." * 10 + "#"] * 10 + ["#" * 12])


def reading(obs, iteration=0, rid=0):
    return SensorReading.from_observations(rid, iteration, obs)


def test_fresh_grid_is_unknown():
    g = OccupancyGrid(4, 5)
    assert g.shape == (4, 5)
    assert np.all(g.prob == UNKNOWN)
    assert g.classify((0, 0)) is CellClass.UNKNOWN


def test_empty_reading_is_identity():
    g = OccupancyGrid(4, 4)
    assert update_occupancy(g, reading([])) == g


def test_single_write():
    g = update_occupancy(OccupancyGrid(5, 5), reading([((2, 2), Label.OCCUPIED)]))
    assert g.prob[2, 2] == 1.0
    mask = np.ones((5, 5), dtype=bool)
    mask[2, 2] = False
    assert np.all(g.prob[mask] == 0.5)
    assert g.classify((2, 2)) is CellClass.OCCUPIED


def test_update_does_not_mutate_input():
    g = OccupancyGrid(3, 3)
    update_occupancy(g, reading([((1, 1), Label.FREE)]))
    assert np.all(g.prob == UNKNOWN)


def test_idempotent_for_full_tile():
    env = load_environment(ROOM)
    rd = sense(env, RobotState(0, CellCoord(5, 5)), 0)
    assert len(rd) == 42
    once = update_occupancy(OccupancyGrid.like(env), rd)
    assert update_occupancy(once, rd) == once


def test_disjoint_readings_union():
    a = reading([((0, 0), Label.FREE), ((0, 1), Label.OCCUPIED)])
    b = reading([((3, 3), Label.FREE)], rid=1)
    g = merge_neighbor_readings(OccupancyGrid(4, 4), [a, b], 0)
    assert g.known().sum() == 3
    assert g.prob[0, 1] == 1.0 and g.prob[0, 0] == 0.0 and g.prob[3, 3] == 0.0


def test_overlapping_readings_any_order():
    env = load_environment(ROOM)
    ra = sense(env, RobotState(0, CellCoord(4, 4)), 2)
    rb = sense(env, RobotState(1, CellCoord(5, 6)), 2)
    base = OccupancyGrid.like(env)
    results = [merge_neighbor_readings(base, list(p), 2) for p in itertools.permutations([ra, rb])]
    folded = update_occupancy(update_occupancy(base, ra), rb)
    assert results[0] == results[1] == folded


def test_stale_reading_rejected():
    cur = reading([((1, 1), Label.FREE)], iteration=5)
    old = reading([((2, 2), Label.FREE)], iteration=4, rid=1)
    with pytest.raises(StaleReading):
        merge_neighbor_readings(OccupancyGrid(4, 4), [cur, old], 5)
    with pytest.raises(StaleReading):
        merge_neighbor_readings(OccupancyGrid(4, 4), [old], 5)
    # the round is taken from the first reading when not given
    with pytest.raises(StaleReading):
        merge_neighbor_readings(OccupancyGrid(4, 4), [cur, old])


def test_coverage_examples():
    env = load_environment("####\n#..#\n#..#\n####")
    assert coverage([OccupancyGrid.like(env)] * 3, env) == 0.0
    full = OccupancyGrid.like(env)
    full.prob[:] = env.blocked
    assert coverage([full], env) == 1.0
    part = OccupancyGrid.like(env)
    part.prob[0, :] = 1.0
    part.prob[1, 1:3] = 0.0
    assert coverage([part], env) == 0.375


def test_coverage_dimension_mismatch():
    env = load_environment("####\n#..#\n####")
    with pytest.raises(DimensionMismatch):
        coverage([OccupancyGrid(4, 4)], env)


def test_render_round_trip():
    g = OccupancyGrid(2, 3)
    g.prob[0, 0] = 0.0
    g.prob[1, 2] = 1.0
    text = render_grid(g)
    assert text == ".??\n??#"
    assert parse_grid(text) == g


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(4)), st.integers(0, 1000))
def test_merge_order_independent_exhaustive(perm, seed):
    env = bundled_map("test20")
    rng = np.random.default_rng(seed)
    free = env.free_cells()
    robots = [RobotState(i, free[int(j)]) for i, j in enumerate(rng.choice(len(free), 4, replace=False))]
    readings = [sense(env, r, 1) for r in robots]
    base = OccupancyGrid.like(env)
    ref = merge_neighbor_readings(base, readings, 1)
    assert merge_neighbor_readings(base, [readings[i] for i in perm], 1) == ref
    # consistency with ground truth on every observed cell
    known = ref.known()
    assert np.array_equal(ref.prob[known], env.blocked[known].astype(float))
