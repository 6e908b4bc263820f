"""Heading consensus on a ring of agents; prints disagreement per round.

    python3 scripts/consensus_demo.py [--agents 8] [--dt 0.1] [--eta 0.0]
"""

import argparse

import numpy as np

from collmap.netgraph import InteractionNetwork
from collmap.swarm import HeadingVector, vicsek_update


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--agents", type=int, default=8)
    ap.add_argument("--dt", type=float, default=0.1)
    ap.add_argument("--eta", type=float, default=0.0)
    ap.add_argument("--rounds", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    n = args.agents
    rng = np.random.default_rng(args.seed)
    net = InteractionNetwork(0, {i: ((i - 1) % n, (i + 1) % n) for i in range(n)})
    h = HeadingVector(tuple(range(n)), tuple(rng.uniform(-1.0, 1.0, n)))
    for t in range(args.rounds + 1):
        if t % 100 == 0:
            print(f"{t:5d}  {h.disagreement():.3e}")
        h = vicsek_update(h, net, args.dt, args.eta, rng=rng)


if __name__ == "__main__":
    main()
