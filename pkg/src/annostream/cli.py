"""Command line: ``annostream {gen,prove,verify,attack,bench} --protocol NAME ...``

Reports are single ``key=value`` lines (``--human`` for an aligned table).
Exit codes: 0 on Value/Accept, 1 on Bottom, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from . import REGISTRY
from .core import MUTATION_KINDS, Accept, Bottom, Value, attack, run_protocol
from .stream import (ParseError, annotation_protocol, load_stream, read_annotation,
                     write_annotation, write_stream)
from .workloads import UsageError, make_instance

EXIT_OK, EXIT_REJECT, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="annostream", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=("gen", "prove", "verify", "attack", "bench"))
    ap.add_argument("--protocol", required=True)
    ap.add_argument("--n", type=int)
    ap.add_argument("--m", type=int)
    ap.add_argument("--b", type=int)
    ap.add_argument("--c", type=int)
    ap.add_argument("--alpha", type=Fraction)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--in", dest="inp", help="stream file (AS1)")
    ap.add_argument("--ann", help="annotation file (AN1)")
    ap.add_argument("--out", help="output file; stdout if omitted")
    ap.add_argument("--trials", type=int, help="attack runs per kind (100) or bench seeds (3)")
    ap.add_argument("--mutate", choices=MUTATION_KINDS, action="append",
                    help="mutation kind for attack (repeatable; default all)")
    ap.add_argument("--sizes", help="bench ladder, comma separated")
    ap.add_argument("--vary", default="m", choices=("n", "m", "b", "c"))
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--human", action="store_true")
    return ap


def _fmt(v) -> str:
    if isinstance(v, (tuple, list)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def report(fields: dict, human: bool = False) -> str:
    if human:
        width = max(map(len, fields))
        return "\n".join(f"{k:<{width}}  {_fmt(v)}" for k, v in fields.items())
    return " ".join(f"{k}={_fmt(v)}" for k, v in fields.items())


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read(path: str | None, what: str) -> str:
    if not path:
        raise UsageError(f"--{what} is required")
    with open(path) as fh:
        return fh.read()


def _outcome_fields(out) -> dict:
    if isinstance(out, Value):
        return {"outcome": "value", "value": out.value}
    if isinstance(out, Accept):
        return {"outcome": "accept"}
    return {"outcome": "bottom", "reason": out.reason}


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    header, stream = make_instance(args.protocol, rng, n=args.n, m=args.m, b=args.b, c=args.c,
                                   alpha=args.alpha)
    _write(write_stream(header, stream), args.out)
    return EXIT_OK


def cmd_prove(args) -> int:
    proto = REGISTRY[args.protocol]
    header, stream = load_stream(_read(args.inp, "in"))
    _write(write_annotation(proto.prove(header, stream), proto.name), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    proto = REGISTRY[args.protocol]
    text = _read(args.ann, "ann")
    tagged = annotation_protocol(text)
    if tagged and tagged != proto.name:
        raise UsageError(f"annotation is for {tagged!r}, not {proto.name!r}")
    header, stream = load_stream(_read(args.inp, "in"))
    out, cost = run_protocol(proto.verifier, header, stream, read_annotation(text), args.seed)
    print(report({"protocol": proto.name, **_outcome_fields(out), "hcost": cost.hcost,
                  "vcost": cost.vcost, "stream_len": cost.stream_len}, args.human))
    return EXIT_REJECT if isinstance(out, Bottom) else EXIT_OK


def cmd_attack(args) -> int:
    proto = REGISTRY[args.protocol]
    if args.inp:
        header, stream = load_stream(_read(args.inp, "in"))
    else:
        header, stream = make_instance(args.protocol, random.Random(args.seed), n=args.n,
                                       m=args.m, b=args.b, c=args.c, alpha=args.alpha)
    honest = proto.prove(header, stream)
    table = attack(proto, header, stream, honest, args.mutate or MUTATION_KINDS, args.trials or 100,
                   seed=args.seed)
    worst = 1.0
    for kind, (rej, runs) in table.items():
        worst = min(worst, rej / runs)
        print(report({"protocol": proto.name, "mutate": kind, "runs": runs, "rejected": rej,
                      "rate": f"{rej / runs:.4f}"}, args.human))
    return EXIT_OK if worst >= 0.99 else EXIT_REJECT


def cmd_bench(args) -> int:
    from .bench import LadderConfig, run_ladder
    sizes = tuple(int(s) for s in args.sizes.split(",")) if args.sizes else (256, 1024, 4096)
    fixed = {k: getattr(args, k) for k in ("n", "m", "b", "c", "alpha")
             if getattr(args, k) is not None and k != args.vary}
    cfg = LadderConfig(args.protocol, args.vary, sizes, trials=args.trials or 3,
                       seed=args.seed, fixed=fixed, jobs=args.jobs)
    for row in run_ladder(cfg):
        print(report(row, args.human))
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "prove": cmd_prove, "verify": cmd_verify, "attack": cmd_attack,
            "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.protocol not in REGISTRY:
        print(f"error: unknown protocol {args.protocol!r}; known: {', '.join(REGISTRY)}",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
