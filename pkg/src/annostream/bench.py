"""Cost measurements: ladders over one size parameter and the matvec sweep.

Rows are plain dicts so scripts can print them as ``key=value`` lines or
tables.  Runs are independent; ``jobs > 1`` spreads them over processes and
the rows are sorted by (size, seed) afterwards.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .core import REGISTRY, Bottom, run_protocol
from .workloads import make_instance


@dataclass
class LadderConfig:
    protocol: str
    vary: str = "m"                       # which size parameter the ladder walks
    sizes: tuple = (256, 1024, 4096, 16384)
    trials: int = 1
    seed: int = 0
    fixed: dict = field(default_factory=dict)
    density: int = 4                      # m = density * n when only one is given
    meter: bool | int = True
    jobs: int = 1


def _params(cfg: LadderConfig, size) -> dict:
    p = dict(cfg.fixed)
    p[cfg.vary] = size
    if cfg.vary == "m" and "n" not in p:
        p["n"] = max(2, size // cfg.density)
    if cfg.vary == "n" and "m" not in p:
        p["m"] = cfg.density * size
    return p


def measure_one(protocol: str, params: dict, seed: int, meter: bool | int = True) -> dict:
    proto = REGISTRY[protocol]
    rng = random.Random(seed)
    header, stream = make_instance(protocol, rng, **params)
    t0 = time.perf_counter()
    ann = proto.prove(header, stream)
    t1 = time.perf_counter()
    out, cost = run_protocol(proto.verifier, header, stream, ann, seed, meter=meter)
    t2 = time.perf_counter()
    return {"protocol": protocol, **{k: _plain(v) for k, v in params.items()}, "seed": seed,
            "n_actual": header.get("n", 0), "m_actual": header.m,
            "hcost": cost.hcost, "vcost": cost.vcost, "ok": not isinstance(out, Bottom),
            "prove_s": round(t1 - t0, 4), "verify_s": round(t2 - t1, 4)}


def _plain(v):
    return str(v) if isinstance(v, Fraction) else v


def _job(args):
    cfg, size, seed = args
    row = measure_one(cfg.protocol, _params(cfg, size), seed, cfg.meter)
    row["size"] = size
    return row


def run_ladder(cfg: LadderConfig) -> list[dict]:
    if list(cfg.sizes) != sorted(cfg.sizes):
        raise ValueError("ladder sizes must be increasing")
    jobs = [(cfg, size, cfg.seed + t) for size in cfg.sizes for t in range(cfg.trials)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as ex:
            rows = list(ex.map(_job, jobs))
    else:
        rows = [_job(j) for j in jobs]
    return sorted(rows, key=lambda r: (r["size"], r["seed"]))


def spread(values) -> float:
    """max / min of a positive series."""
    values = list(values)
    return max(values) / min(values)


# --- matvec tradeoff ------------------------------------------------------------

ALPHAS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


def tradeoff_sweep(b: int = 4096, c: int = 4096, alphas=ALPHAS, nnz: int | None = None,
                   seed: int = 0, meter: int = 4096) -> list[dict]:
    """Measure hcost and vcost of one product per alpha.

    The annotation is produced lazily so the largest sweep point never
    materialises in memory; metering uses a stride (see ``run_protocol``),
    which is exact here because verifier state only changes shape at tag
    boundaries.
    """
    from .field import default_prime
    from .matvec import MatvecVerifier, _matrix_parts, grid_dims, iter_matvec_tokens, \
        random_matrix_stream
    rows = []
    for a in alphas:
        rng = random.Random(seed)
        header, stream = random_matrix_stream(rng, b, c, a, nnz if nnz is not None else b)
        entries, vec = _matrix_parts(stream)
        t0 = time.perf_counter()
        ann = iter_matvec_tokens(b, c, a, entries, vec, default_prime())
        out, cost = run_protocol(MatvecVerifier, header, stream, ann, seed, meter=meter)
        h, v = grid_dims(c, a)
        rows.append({"alpha": str(a), "h": h, "v": v, "hcost": cost.hcost, "vcost": cost.vcost,
                     "ok": not isinstance(out, Bottom),
                     "v_model": c ** (1 - float(a)), "h_model": b * c ** float(a),
                     "seconds": round(time.perf_counter() - t0, 2)})
    return rows


def fit_tradeoff(rows: list[dict]) -> dict:
    """Single constant ``K``: geometric mean of every cost/model ratio."""
    ratios = [r["vcost"] / r["v_model"] for r in rows] + [r["hcost"] / r["h_model"] for r in rows]
    K = math.exp(sum(math.log(x) for x in ratios) / len(ratios))
    worst = max(max(x / K, K / x) for x in ratios)
    return {"K": K, "worst_factor": worst, "ratios": ratios}


# --- completeness and soundness -------------------------------------------------

def completeness(protocol: str, count: int = 1000, seed: int = 0, max_size: int = 12) -> dict:
    """Honest prove/verify against the oracle on ``count`` generated instances."""
    proto = REGISTRY[protocol]
    rng = random.Random(seed)
    bad = []
    t0 = time.perf_counter()
    for i in range(count):
        header, stream = proto.gen(rng, rng.randint(1, max_size))
        out, _ = run_protocol(proto.verifier, header, stream, proto.prove(header, stream),
                              seed * 100003 + i, meter=False)
        if out != proto.oracle(header, stream):
            bad.append(i)
    return {"protocol": protocol, "runs": count, "bad": len(bad), "first_bad": bad[:5],
            "seconds": round(time.perf_counter() - t0, 2)}


def soundness(protocol: str, runs_per_kind: int = 500, per_instance: int = 50, seed: int = 0,
              size: int = 10, max_instances: int = 400) -> dict[str, tuple[int, int]]:
    """Attack fresh generated inputs until every kind has ``runs_per_kind`` runs.

    Kinds that no instance admits (e.g. a wrong answer for a protocol that
    only accepts) end with zero runs.
    """
    from .core import MUTATION_KINDS, attack
    proto = REGISTRY[protocol]
    rng = random.Random(seed)
    totals = {k: [0, 0] for k in MUTATION_KINDS}
    barren = {k: 0 for k in MUTATION_KINDS}
    for i in range(max_instances):
        todo = [k for k in MUTATION_KINDS if totals[k][1] < runs_per_kind and barren[k] < 20]
        if not todo:
            break
        header, stream = proto.gen(rng, size)
        honest = proto.prove(header, stream)
        for kind in todo:
            want = min(per_instance, runs_per_kind - totals[kind][1])
            rej, runs = attack(proto, header, stream, honest, [kind], want,
                               seed=seed * 7919 + i).get(kind, (0, 0))
            totals[kind][0] += rej
            totals[kind][1] += runs
            # stop drawing for kinds that keep finding nothing to mutate
            barren[kind] = barren[kind] + 1 if runs == 0 and totals[kind][1] == 0 else 0
    return {k: tuple(v) for k, v in totals.items()}
