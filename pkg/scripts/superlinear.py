"""Annotation growth of the memory-checked and power-iteration protocols."""

import argparse
import math

from annostream.bench import measure_one

NORMS = {
    "sssp": ("m+n log n", lambda n, m: m + n * math.log2(n)),
    "apsp": ("n^3", lambda n, m: n ** 3),
    "diameter": ("n^2 log n", lambda n, m: n * n * math.log2(n)),
}

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--sizes", default="8,16,32,64")
ap.add_argument("--density", type=int, default=4)
args = ap.parse_args()

for name, (label, norm) in NORMS.items():
    for n in (int(s) for s in args.sizes.split(",")):
        r = measure_one(name, {"n": n, "m": args.density * n}, 0, meter=False)
        ratio = r["hcost"] / norm(r["n_actual"], r["m_actual"])
        print(f"{name:<9} n={n:<4} m={r['m_actual']:<5} hcost={r['hcost']:<9} "
              f"hcost/({label})={ratio:.2f}", flush=True)
