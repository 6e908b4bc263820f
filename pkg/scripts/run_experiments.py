"""Run the three studies on the bundled basilica map and save their metrics.

    python3 scripts/run_experiments.py [--out results] [--repeats 5]

Writes scalability.csv, network_effect.csv and robustness.csv plus a
summary.txt with the per-condition tables.
"""

import argparse
from dataclasses import replace
from pathlib import Path

from collmap import harness
from collmap.netgraph import TopologySpec

STUDIES = {
    "scalability": (harness.run_scalability, {}),
    "network_effect": (harness.run_network_effect, {"robots": 15}),
    "robustness": (harness.run_robustness, {"robots": 20}),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for name, (study, overrides) in STUDIES.items():
        cfg = replace(harness.ExperimentConfig(seed=args.seed, repeats=args.repeats), **overrides)
        if name == "robustness":
            cfg = replace(cfg, topology=TopologySpec.knn(2))
        exp = harness.Experiment(cfg)
        table = harness.format_table(study(cfg, experiment=exp))
        harness.write_csv(exp.records, out / f"{name}.csv")
        summary.append(f"== {name}\n{table}\n")
        print(summary[-1], flush=True)
    (out / "summary.txt").write_text("\n".join(summary))


if __name__ == "__main__":
    main()
