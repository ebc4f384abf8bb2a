"""Honest prove -> verify against the oracle for every protocol."""

import argparse

from annostream import REGISTRY
from annostream.bench import completeness

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--count", type=int, default=1000)
ap.add_argument("--max-size", type=int, default=12)
ap.add_argument("--seed", type=int, default=1)
ap.add_argument("protocols", nargs="*", default=list(REGISTRY))
args = ap.parse_args()

total = 0.0
for name in args.protocols:
    r = completeness(name, args.count, args.seed, args.max_size)
    total += r["seconds"]
    print(f"{name:<11} runs={r['runs']} bad={r['bad']} first_bad={r['first_bad']} "
          f"{r['seconds']:.1f}s", flush=True)
print(f"total {total:.1f}s")
