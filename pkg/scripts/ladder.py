"""hcost / vcost over a size ladder; (m, 1) protocols should show flat vcost."""

import argparse

from annostream.bench import LadderConfig, run_ladder, spread

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("protocols", nargs="*",
                default=["dag", "matching", "spath", "mst", "bfs", "dfs", "bipartite"])
ap.add_argument("--sizes", default="256,1024,4096,16384")
ap.add_argument("--vary", default="m")
ap.add_argument("--trials", type=int, default=1)
ap.add_argument("--jobs", type=int, default=1)
args = ap.parse_args()

sizes = tuple(int(s) for s in args.sizes.split(","))
print(f"{'protocol':<10} {'size':>7} {'n':>6} {'m':>7} {'hcost':>9} {'h/m':>7} {'vcost':>6}")
for name in args.protocols:
    rows = run_ladder(LadderConfig(name, args.vary, sizes, args.trials, jobs=args.jobs))
    for r in rows:
        print(f"{name:<10} {r['size']:>7} {r['n_actual']:>6} {r['m_actual']:>7} {r['hcost']:>9} "
              f"{r['hcost'] / max(r['m_actual'], 1):>7.2f} {r['vcost']:>6}")
    print(f"{name:<10} vcost spread {spread(r['vcost'] for r in rows):.3f}", flush=True)
