"""Experiment driver: configs, the three studies, CSV output and exports.

Every experiment is a pure function of its config. Repeat ``i`` of a
condition uses seed ``config.seed + i``; for a fixed seed the placements of
different swarm sizes are nested, so conditions share random numbers.
"""

from __future__ import annotations

import io
import statistics
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import IO, Iterable, Sequence

from .errors import ConfigError, MapError, NonTermination, SinkFailure
from .netgraph import RemovalSchedule, TopologySpec
from .occupancy import render_grid
from .swarm import MetricsRecord, SimState, completed, make_state, run
from .world import SEED_MASK, Environment, bundled_map, read_map

DEFAULT_COUNTS = (5, 10, 15, 20)
DEFAULT_TOPOLOGIES = tuple(
    [TopologySpec.chain(), TopologySpec.none()] + [TopologySpec.knn(k) for k in range(1, 7)]
)
DEFAULT_SCHEDULE = RemovalSchedule(interval=50, count=5, max_events=3)


@dataclass(frozen=True)
class ExperimentConfig:
    map_path: str = "basilica"  # file path, or the name of a bundled map
    robots: int = 20
    topology: TopologySpec = TopologySpec.knn(1)
    seed: int = 0
    max_iterations: int = 5000
    removal: RemovalSchedule | None = None
    occlusion: bool = True
    repeats: int = 5

    def __post_init__(self):
        if self.robots < 1:
            raise ConfigError("robots must be >= 1")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")

    def seeds(self) -> list[int]:
        return [(self.seed + i) & SEED_MASK for i in range(self.repeats)]

    def environment(self) -> Environment:
        return load_map(self.map_path)


def load_map(map_path: str) -> Environment:
    path = Path(map_path)
    try:
        if path.is_file():
            return read_map(path)
        if path.suffix == "" and len(path.parts) == 1:
            return bundled_map(map_path)
    except (OSError, MapError) as exc:
        raise ConfigError(f"cannot load map {map_path!r}: {exc}") from exc
    raise ConfigError(f"map file not found: {map_path}")


# config files: flat "key = value" lines, '#' starts a comment


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "true", "yes", "1"):
        return True
    if t in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_removal(text: str) -> RemovalSchedule | None:
    """'none', or 'interval,count,max_events[,mode]'."""
    t = text.strip().lower()
    if t in ("", "none", "off"):
        return None
    parts = [p.strip() for p in t.split(",")]
    try:
        if len(parts) == 3:
            return RemovalSchedule(*map(int, parts))
        if len(parts) == 4:
            return RemovalSchedule(int(parts[0]), int(parts[1]), int(parts[2]), parts[3])
    except ValueError as exc:
        raise ConfigError(f"bad removal schedule {text!r}: {exc}") from exc
    raise ConfigError(f"bad removal schedule {text!r}")


def _convert(key: str, value: str):
    try:
        if key in ("robots", "seed", "max_iterations", "repeats"):
            return int(value, 0)
        if key == "topology":
            return TopologySpec.parse(value)
        if key == "occlusion":
            return parse_bool(value)
        if key == "removal":
            return parse_removal(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return value.strip()


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, value)
    return replace(base or ExperimentConfig(), **values)


def read_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base)


def dump_config(cfg: ExperimentConfig) -> str:
    rem = cfg.removal
    lines = [
        f"map_path = {cfg.map_path}",
        f"robots = {cfg.robots}",
        f"topology = {topology_text(cfg.topology)}",
        f"seed = {cfg.seed}",
        f"max_iterations = {cfg.max_iterations}",
        "removal = none" if rem is None else f"removal = {rem.interval},{rem.count},{rem.max_events},{rem.mode}",
        f"occlusion = {'on' if cfg.occlusion else 'off'}",
        f"repeats = {cfg.repeats}",
    ]
    return "\n".join(lines) + "\n"


def topology_text(spec: TopologySpec) -> str:
    return f"knn:{spec.k}" if spec.kind == "knn" else spec.kind


# running


@dataclass
class RunResult:
    run_id: int
    condition: str
    seed: int
    robots: int
    records: list[MetricsRecord]
    final: SimState = field(repr=False)

    @property
    def completed(self) -> bool:
        return completed(self.records)

    @property
    def iterations(self) -> int:
        return len(self.records)

    def failure(self) -> NonTermination | None:
        if self.completed:
            return None
        why = "stalled" if self.final.stalled else "hit the iteration cap"
        cov = self.records[-1].coverage if self.records else 0.0
        return NonTermination(
            f"run {self.run_id} ({self.condition}, seed {self.seed}) {why} "
            f"at iteration {self.iterations} with coverage {cov:.6f}"
        )


@dataclass
class Condition:
    label: str
    runs: list[RunResult]

    @property
    def iterations(self) -> list[int]:
        return [r.iterations for r in self.runs]

    @property
    def mean(self) -> float:
        return statistics.fmean(self.iterations)

    @property
    def all_completed(self) -> bool:
        return all(r.completed for r in self.runs)


class Experiment:
    """Runs conditions in order and hands out consecutive run ids."""

    def __init__(self, base: ExperimentConfig, export_maps=None, export_networks=None):
        self.base = base
        self.env = base.environment()
        self.export_maps = Path(export_maps) if export_maps else None
        self.export_networks = Path(export_networks) if export_networks else None
        self.results: list[RunResult] = []

    def run_one(self, cfg: ExperimentConfig, seed: int, label: str) -> RunResult:
        run_id = len(self.results)
        state = make_state(self.env, cfg.robots, cfg.topology, seed, cfg.removal, cfg.occlusion)
        nets = [] if self.export_networks else None

        def keep_network(st, rec):
            nets.append(f"iteration {st.iteration}\n{st.network.dump()}")

        records, final = run(state, cfg.max_iterations, run_id, keep_network if nets is not None else None)
        res = RunResult(run_id, label, seed, cfg.robots, records, final)
        self.results.append(res)
        if self.export_maps:
            export_maps(final, self.export_maps, run_id)
        if nets is not None:
            self.export_networks.mkdir(parents=True, exist_ok=True)
            (self.export_networks / f"run{run_id:03d}.net").write_text("\n".join(nets) + "\n")
        return res

    def condition(self, cfg: ExperimentConfig, label: str) -> Condition:
        return Condition(label, [self.run_one(cfg, s, label) for s in cfg.seeds()])

    @property
    def records(self) -> list[MetricsRecord]:
        return [rec for r in self.results for rec in r.records]

    def failures(self) -> list[NonTermination]:
        return [f for f in (r.failure() for r in self.results) if f is not None]


def export_maps(state: SimState, directory: Path, run_id: int) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for r in state.robots:
        (directory / f"run{run_id:03d}_robot{r.id:02d}.txt").write_text(render_grid(state.maps[r.id]) + "\n")


def run_single(base: ExperimentConfig, experiment: Experiment | None = None) -> Condition:
    exp = experiment or Experiment(base)
    cfg = replace(base, repeats=1)
    return exp.condition(cfg, f"{base.robots} robots {base.topology.label}")


def run_scalability(
    base: ExperimentConfig, robot_counts: Sequence[int] = DEFAULT_COUNTS, experiment: Experiment | None = None
) -> list[Condition]:
    exp = experiment or Experiment(base)
    return [exp.condition(replace(base, robots=n), f"{n} robots") for n in robot_counts]


def run_network_effect(
    base: ExperimentConfig,
    topologies: Sequence[TopologySpec] = DEFAULT_TOPOLOGIES,
    experiment: Experiment | None = None,
) -> list[Condition]:
    exp = experiment or Experiment(base)
    return [exp.condition(replace(base, topology=t), t.label) for t in topologies]


def run_robustness(
    base: ExperimentConfig, schedule: RemovalSchedule = DEFAULT_SCHEDULE, experiment: Experiment | None = None
) -> list[Condition]:
    """Full swarm, final-size swarm and the decaying swarm, in that order."""
    final_size = base.robots - schedule.count * schedule.max_events
    if final_size < 1:
        raise ConfigError("schedule would remove every robot")
    exp = experiment or Experiment(base)
    return [
        exp.condition(replace(base, removal=None), f"static {base.robots}"),
        exp.condition(replace(base, robots=final_size, removal=None), f"static {final_size}"),
        exp.condition(replace(base, removal=schedule), f"decaying {base.robots}->{final_size}"),
    ]


# output


def csv_text(records: Iterable[MetricsRecord]) -> str:
    rows = sorted(records, key=lambda r: (r.run_id, r.iteration))
    out = io.StringIO()
    out.write("run_id,iteration,coverage,alive\n")
    for r in rows:
        out.write(f"{r.run_id},{r.iteration},{r.coverage:.6f},{r.alive}\n")
    return out.getvalue()


def write_csv(records: Iterable[MetricsRecord], sink: str | Path | IO[str]) -> None:
    text = csv_text(records)
    try:
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        raise SinkFailure(f"cannot write metrics: {exc}") from exc


def format_table(conditions: Sequence[Condition]) -> str:
    width = max([len(c.label) for c in conditions] + [9])
    lines = [f"{'condition':<{width}}  {'mean':>8}  {'min':>6}  {'max':>6}  runs"]
    for c in conditions:
        its = c.iterations
        runs = " ".join(str(r.iterations) + ("" if r.completed else "!") for r in c.runs)
        lines.append(f"{c.label:<{width}}  {c.mean:>8.1f}  {min(its):>6}  {max(its):>6}  {runs}")
    if any(not c.all_completed for c in conditions):
        lines.append("! = did not reach full coverage (non-termination)")
    return "\n".join(lines)
