"""Decentralised collective mapping by a swarm of robots on a k-NN network."""

from .netgraph import InteractionNetwork, RemovalSchedule, TopologySpec, build_network, k_nearest_neighbors
from .occupancy import OccupancyGrid, coverage, merge_neighbor_readings, update_occupancy
from .planning import astar, detect_frontiers, select_target
from .sensing import SensorReading, sense
from .swarm import HeadingVector, MetricsRecord, SimState, make_state, run, step, vicsek_update
from .world import CellCoord, Environment, RobotState, bundled_map, load_environment, place_robots

__version__ = "0.1.0"
