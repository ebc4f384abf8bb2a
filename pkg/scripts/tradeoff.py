"""Matrix-vector product: annotation vs space as alpha moves the grid shape."""

import argparse

from annostream.bench import fit_tradeoff, tradeoff_sweep

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--b", type=int, default=4096)
ap.add_argument("--c", type=int, default=4096)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

rows = tradeoff_sweep(args.b, args.c, seed=args.seed)
fit = fit_tradeoff(rows)
K = fit["K"]
print(f"{'alpha':>5} {'h':>5} {'v':>5} {'hcost':>9} {'K*b*c^a':>10} {'vcost':>6} {'K*c^(1-a)':>10} {'s':>6}")
for r in rows:
    print(f"{r['alpha']:>5} {r['h']:>5} {r['v']:>5} {r['hcost']:>9} {K * r['h_model']:>10.0f} "
          f"{r['vcost']:>6} {K * r['v_model']:>10.1f} {r['seconds']:>6}")
print(f"K={K:.3f} worst factor {fit['worst_factor']:.2f}")
