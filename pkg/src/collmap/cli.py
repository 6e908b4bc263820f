"""Command line entry point: ``python3 -m collmap <subcommand> ...``.

Exit status: 0 on success, 1 on a configuration error, 2 when any run
ended without full coverage.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import harness
from .errors import CollmapError, ConfigError, SinkFailure
from .netgraph import TopologySpec

# per-study defaults, applied before the config file and the flags
STUDY_DEFAULTS = {
    "run": {},
    "scalability": {"topology": TopologySpec.knn(1)},
    "network-effect": {"robots": 15},
    "robustness": {"robots": 20, "topology": TopologySpec.knn(2)},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="collmap", description="Collective mapping experiments on occupancy grids.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--map", dest="map_path", help="map file or bundled map name")
    common.add_argument("--robots", type=int)
    common.add_argument("--k", type=int, help="neighbour count for the knn topology")
    common.add_argument("--topology", choices=["knn", "chain", "none"])
    common.add_argument("--seed", type=int)
    common.add_argument("--repeats", type=int, help="seeds per condition (seed, seed+1, ...)")
    common.add_argument("--max-iters", dest="max_iterations", type=int)
    common.add_argument("--occlusion", choices=["on", "off"])
    common.add_argument("--out", help="write per-iteration metrics CSV here")
    common.add_argument("--export-maps", help="directory for final per-robot maps")
    common.add_argument("--export-networks", help="directory for per-iteration network snapshots")
    sub.add_parser("run", parents=[common], help="a single run")
    sc = sub.add_parser("scalability", parents=[common], help="iterations to completion vs swarm size")
    sc.add_argument("--counts", type=lambda s: [int(x) for x in s.split(",")], default=list(harness.DEFAULT_COUNTS))
    ne = sub.add_parser("network-effect", parents=[common], help="iterations to completion vs topology")
    ne.add_argument(
        "--topologies",
        type=lambda s: [TopologySpec.parse(x) for x in s.split(",")],
        default=list(harness.DEFAULT_TOPOLOGIES),
        help="comma separated, e.g. chain,none,1nn,2nn",
    )
    sub.add_parser("robustness", parents=[common], help="static vs decaying swarm coverage curves")
    return p


def config_from_args(args) -> harness.ExperimentConfig:
    cfg = replace(harness.ExperimentConfig(), **STUDY_DEFAULTS[args.command])
    if args.config:
        cfg = harness.read_config(args.config, cfg)
    over = {}
    for key in ("map_path", "robots", "seed", "repeats", "max_iterations"):
        if getattr(args, key) is not None:
            over[key] = getattr(args, key)
    if args.occlusion is not None:
        over["occlusion"] = args.occlusion == "on"
    if args.topology == "chain":
        over["topology"] = TopologySpec.chain()
    elif args.topology == "none":
        over["topology"] = TopologySpec.none()
    elif args.topology == "knn" or args.k is not None:
        k = args.k if args.k is not None else (cfg.topology.k if cfg.topology.kind == "knn" else 1)
        if k < 0:
            raise ConfigError("--k must be non-negative")
        over["topology"] = TopologySpec.knn(k)
    return replace(cfg, **over)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        exp = harness.Experiment(cfg, args.export_maps, args.export_networks)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "run":
            conds = [harness.run_single(cfg, exp)]
        elif args.command == "scalability":
            conds = harness.run_scalability(cfg, args.counts, exp)
        elif args.command == "network-effect":
            conds = harness.run_network_effect(cfg, args.topologies, exp)
        else:
            conds = harness.run_robustness(cfg, cfg.removal or harness.DEFAULT_SCHEDULE, exp)
        if args.out:
            harness.write_csv(exp.records, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SinkFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CollmapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    print(harness.format_table(conds))
    failures = exp.failures()
    for f in failures:
        print(f"non-termination: {f}", file=sys.stderr)
    return 2 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
