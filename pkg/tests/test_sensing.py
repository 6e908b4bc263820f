import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collmap.errors import DeadRobot
from collmap.sensing import TILE_SIZE, Label, SensorReading, ray_offsets, sense
from collmap.world import CellCoord, Environment, RobotState, bundled_map, load_environment

from oracles import bresenham, brute_sense


def open_room(n=20):
    return load_environment("\n".join(["#" * n] + ["#" + "." * (n - 2) + "#"] * (n - 2) + ["#" * n]))


def as_dict(reading):
    return {c: lab == Label.OCCUPIED for c, lab in reading.observations}


def test_unclipped_tile_has_42_free_cells():
    env = open_room()
    rd = sense(env, RobotState(0, CellCoord(10, 10)), 0, occlusion=False)
    assert len(rd.observations) == TILE_SIZE == 42
    assert all(lab == Label.FREE for _, lab in rd.observations)
    rows = {c.row for c, _ in rd.observations}
    cols = {c.col for c, _ in rd.observations}
    assert rows == set(range(7, 13)) and cols == set(range(7, 14))


@pytest.mark.parametrize("occlusion", [False, True])
def test_clipped_to_bounds(occlusion):
    env = load_environment("###\n#.#\n###")
    rd = sense(env, RobotState(0, CellCoord(1, 1)), 0, occlusion=occlusion)
    obs = as_dict(rd)
    assert len(obs) == 9
    assert obs.pop((1, 1)) is False
    assert all(obs.values())


def test_dead_robot_cannot_sense():
    with pytest.raises(DeadRobot):
        sense(open_room(), RobotState(0, CellCoord(5, 5), alive=False), 0)


@pytest.mark.parametrize("dr", range(-3, 3))
@pytest.mark.parametrize("dc", range(-3, 4))
def test_ray_offsets_match_oracle(dr, dc):
    assert ray_offsets(dr, dc) == bresenham((0, 0), (dr, dc))


WALL_MAP = """\
#########
#.......#
#.......#
#...#...#
#...#...#
#.......#
#########"""


def test_wall_segment_occludes():
    env = load_environment(WALL_MAP)
    pos = CellCoord(3, 1)
    rd = sense(env, RobotState(0, pos), 4, occlusion=True)
    got = as_dict(rd)
    assert got == brute_sense(env.blocked.tolist(), pos, True)
    # the wall is seen, the cells straight behind it are not
    assert got[(3, 4)] is True
    assert (3, 5) not in got and (4, 5) not in got
    assert len(got) < len(as_dict(sense(env, RobotState(0, pos), 4, occlusion=False)))


@st.composite
def envs_and_positions(draw):
    h = draw(st.integers(3, 11))
    w = draw(st.integers(3, 11))
    bits = draw(st.lists(st.booleans(), min_size=(h - 2) * (w - 2), max_size=(h - 2) * (w - 2)))
    blocked = np.ones((h, w), dtype=bool)
    blocked[1:-1, 1:-1] = np.array(bits, dtype=bool).reshape(h - 2, w - 2)
    free = np.argwhere(~blocked)
    if len(free) == 0:
        blocked[1, 1] = False
        free = np.argwhere(~blocked)
    idx = draw(st.integers(0, len(free) - 1))
    return Environment(blocked), CellCoord(int(free[idx][0]), int(free[idx][1]))


@settings(max_examples=200, deadline=None)
@given(envs_and_positions(), st.booleans())
def test_sense_matches_brute_force(ep, occlusion):
    env, pos = ep
    rd = sense(env, RobotState(3, pos), 7, occlusion)
    obs = as_dict(rd)
    assert obs == brute_sense(env.blocked.tolist(), pos, occlusion)
    # soundness, bounds, size
    assert len(obs) <= 42 and len(rd.observations) == len(rd)
    for (r, c), occ in obs.items():
        assert 0 <= r < env.height and 0 <= c < env.width
        assert occ == bool(env.blocked[r, c])
    assert rd.robot_id == 3 and rd.iteration == 7


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 16), st.integers(3, 16))
def test_full_tile_iff_unclipped_without_occluders(r, c):
    env = open_room(20)
    rd = sense(env, RobotState(0, CellCoord(r, c)), 0, occlusion=True)
    unclipped = 3 <= r <= 17 and 3 <= c <= 16
    assert (len(rd) == 42) == unclipped


def test_sense_is_deterministic():
    env = bundled_map("basilica")
    robot = RobotState(0, CellCoord(30, 30))
    assert sense(env, robot, 1) == sense(env, robot, 1)


def test_reading_from_observations():
    rd = SensorReading.from_observations(1, 2, [((2, 2), Label.OCCUPIED), ((1, 1), Label.FREE)])
    assert rd.observations == {(CellCoord(2, 2), Label.OCCUPIED), (CellCoord(1, 1), Label.FREE)}
    with pytest.raises(ValueError):
        SensorReading.from_observations(1, 2, [((2, 2), Label.OCCUPIED), ((2, 2), Label.FREE)])
