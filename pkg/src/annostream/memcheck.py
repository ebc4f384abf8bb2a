"""Offline memory checking.

Every operation is a read of the old value followed by a write of the new
one.  The row ``(t, op, addr, old, wts, new)`` adds ``(addr, old, wts)`` to
the read multiset and ``(addr, new, t)`` to the write multiset; a read
(``op = 0``) must leave the value unchanged.  At the end the helper lists
every touched address with its final value and timestamp; those close the
reads, and the implicit zero-initialisation ``(addr, 0, 0)`` opens the
writes.  The memory behaved iff both multisets agree.

Values may be negative; they are stored offset by the declared bound.

Stand-alone protocol: the stream is a sequence of ``r addr value`` (a read
that returned ``value``) and ``w addr value`` operations, and the verifier
accepts iff a zero-initialised memory would produce exactly those reads.

Annotation::

    MEM-ROW t op addr old wts new        (t = 1..m, one per stream op)
    MEM-EPILOGUE addr value wts          (strictly increasing addr)
"""

from __future__ import annotations

import random

from .core import Accept, Protocol, Verifier, expect, register
from .stream import StreamHeader, T, Token

READ, WRITE = 0, 1


class MemChecker:
    """Two tuple fingerprints, a clock and the epilogue cursor."""

    def __init__(self, ctx, amax: int, vbound: int, tmax: int):
        self.amax, self.vbound, self.tmax = amax, vbound, tmax
        bounds = (amax, 2 * vbound, tmax)
        self.reads = ctx.tuple_fingerprint(bounds)
        self.writes = ctx.tuple_fingerprint(bounds)
        self.clock = 0
        self.last = 0

    def _addr(self, a):
        expect(isinstance(a, int) and 1 <= a <= self.amax, "domain", f"address {a}")
        return a

    def _val(self, v):
        expect(isinstance(v, int) and abs(v) <= self.vbound, "domain", f"value {v}")
        return v + self.vbound

    def row(self, t: int, op: int, addr: int, old: int, wts: int, new: int) -> None:
        expect(self.last == 0, "structure", "row after the epilogue")
        expect(t == self.clock + 1, "clock", f"row {t} after {self.clock}")
        expect(t <= self.tmax, "runaway", "step bound exceeded")
        expect(op in (READ, WRITE), "structure", f"op {op}")
        expect(op == WRITE or new == old, "structure", "a read must not change the value")
        expect(isinstance(wts, int) and 0 <= wts < t, "timestamp", f"wts {wts} at t {t}")
        self.clock = t
        a = self._addr(addr)
        self.reads.update((a, self._val(old), wts))
        self.writes.update((a, self._val(new), t))

    def epilogue(self, addr: int, value: int, wts: int) -> None:
        expect(addr > self.last, "structure", "epilogue must be sorted without repeats")
        expect(isinstance(wts, int) and 0 <= wts <= self.clock, "timestamp", f"wts {wts}")
        a = self._addr(addr)
        self.last = a
        self.reads.update((a, self._val(value), wts))
        self.writes.update((a, self.vbound, 0))

    def finish(self) -> None:
        expect(self.reads == self.writes, "memory-tamper")


class MemoryTrace:
    """Honest side: a dict memory that records rows and final state."""

    def __init__(self):
        self.mem: dict[int, int] = {}
        self.stamp: dict[int, int] = {}
        self.clock = 0
        self.rows: list[tuple] = []

    def access(self, op: int, addr: int, new: int | None = None) -> int:
        self.clock += 1
        old = self.mem.get(addr, 0)
        wts = self.stamp.get(addr, 0)
        if op == READ:
            new = old
        self.rows.append((self.clock, op, addr, old, wts, new))
        self.mem[addr] = new
        self.stamp[addr] = self.clock
        return old

    def epilogue(self) -> list[tuple]:
        return [(a, self.mem[a], self.stamp[a]) for a in sorted(self.mem)]

    def tokens(self, rows=True) -> list[Token]:
        out = [T("MEM-ROW", *r) for r in self.rows] if rows else []
        return out + [T("MEM-EPILOGUE", *e) for e in self.epilogue()]

    def bounds(self) -> tuple[int, int, int]:
        amax = max(self.mem, default=1)
        vbound = max((abs(r[k]) for r in self.rows for k in (3, 5)), default=1)
        return amax, max(vbound, 1), max(self.clock, 1)


MEM_SCHEMA = {"MEM-ROW": "kknvkv", "MEM-EPILOGUE": "nvk"}


class MemcheckVerifier(Verifier):
    protocol = "memcheck"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        amax, vbound, m = header.amax, header.vbound, max(header.m, 1)
        self.checker = MemChecker(ctx, amax, vbound, m)
        bounds = (m, 1, amax, 2 * vbound)
        self.sops = ctx.tuple_fingerprint(bounds)
        self.rops = ctx.tuple_fingerprint(bounds)
        self.n_ops = 0

    def on_stream(self, tok):
        addr, v = tok.args
        expect(isinstance(v, int) and abs(v) <= self.header.vbound, "domain", f"value {v}")
        self.n_ops += 1
        self.sops.update((self.n_ops, int(tok.tag == "w"), addr, v + self.header.vbound))

    def on_annotation(self, tok):
        if tok.tag == "MEM-ROW":
            t, op, addr, old, wts, new = tok.args
            self.checker.row(t, op, addr, old, wts, new)
            self.rops.update((t, op, addr, new + self.header.vbound))
        elif tok.tag == "MEM-EPILOGUE":
            self.checker.epilogue(*tok.args)
        else:
            expect(False, "structure", f"unexpected {tok.tag}")

    def finish(self):
        expect(self.checker.clock == self.n_ops, "structure", "transcript length differs from the stream")
        expect(self.sops == self.rops, "tamper", "rows differ from the stream")
        self.checker.finish()
        return Accept()


def memcheck_prove(header, stream) -> list[Token]:
    trace = MemoryTrace()
    for tok in stream:
        if tok.tag == "r":
            trace.access(READ, tok.args[0])
        else:
            trace.access(WRITE, tok.args[0], tok.args[1])
    return trace.tokens()


def random_transcript(rng: random.Random, n_ops: int, amax: int, vbound: int = 1000,
                      consistent: bool = True) -> tuple[StreamHeader, list[Token]]:
    mem: dict[int, int] = {}
    toks = []
    for _ in range(n_ops):
        a = rng.randint(1, amax)
        if rng.random() < 0.5:
            v = rng.randint(-vbound, vbound)
            mem[a] = v
            toks.append(T("w", a, v))
        else:
            toks.append(T("r", a, mem.get(a, 0)))
    if not consistent:
        reads = [i for i, t in enumerate(toks) if t.tag == "r"]
        if reads:
            i = rng.choice(reads)
            a, v = toks[i].args
            toks[i] = T("r", a, v + 1 if v < vbound else v - 1)
    return StreamHeader("mem", {"amax": amax, "vbound": vbound, "m": n_ops}), toks


def _gen(rng: random.Random, size: int):
    return random_transcript(rng, rng.randint(0, 4 * max(size, 1)), max(1, rng.randint(1, max(size, 1))))


def _oracle(header, stream):
    from .oracles import memory_replay
    ok = memory_replay([(t.tag, *t.args) for t in stream])
    return Accept() if ok else None


def _forge_read(tokens, rng):
    """Claim that some read returned a different value."""
    idx = [i for i, t in enumerate(tokens) if t.tag == "MEM-ROW" and t.args[1] == READ]
    if not idx:
        return None
    i = rng.choice(idx)
    t, op, addr, old, wts, new = tokens[i].args
    out = list(tokens)
    out[i] = T("MEM-ROW", t, op, addr, old + 1, wts, new + 1)
    return out


register(Protocol(
    name="memcheck",
    verifier=MemcheckVerifier,
    prove=memcheck_prove,
    gen=_gen,
    oracle=_oracle,
    schema=MEM_SCHEMA,
    wrong_answer=_forge_read,
    node_bound=lambda h: h.amax,
))
