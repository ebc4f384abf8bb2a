"""Rejection rates of mutated honest annotations, per protocol and mutation kind."""

import argparse

from annostream import REGISTRY
from annostream.bench import soundness

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--runs", type=int, default=500, help="attacked runs per kind")
ap.add_argument("--size", type=int, default=6)
ap.add_argument("--seed", type=int, default=2)
ap.add_argument("protocols", nargs="*", default=list(REGISTRY))
args = ap.parse_args()

for name in args.protocols:
    table = soundness(name, args.runs, seed=args.seed, size=args.size)
    cells = []
    for kind, (rej, runs) in table.items():
        cells.append(f"{kind}={rej}/{runs}" if runs else f"{kind}=n/a")
    print(f"{name:<11} " + " ".join(cells), flush=True)
