"""Exception hierarchy shared by every collmap module."""


class CollmapError(Exception):
    pass


# map ingestion
class MapError(CollmapError, ValueError):
    pass


class EmptyMap(MapError):
    pass


class RaggedMap(MapError):
    pass


class IllegalChar(MapError):
    pass


class OpenBoundary(MapError):
    pass


class TooManyRobots(CollmapError, ValueError):
    pass


# simulation
class DeadRobot(CollmapError):
    pass


class UnknownRobot(CollmapError, KeyError):
    pass


class NoRobotsAlive(CollmapError):
    pass


class StaleReading(CollmapError):
    """A reading from another round was offered to a merge (history sharing)."""


class DimensionMismatch(CollmapError, ValueError):
    pass


class StartOccupied(CollmapError, ValueError):
    pass


class IdMismatch(CollmapError, ValueError):
    pass


# harness
class ConfigError(CollmapError, ValueError):
    pass


class SinkFailure(CollmapError, OSError):
    pass


class NonTermination(CollmapError):
    """A run ended (iteration cap or stall) before full coverage."""
