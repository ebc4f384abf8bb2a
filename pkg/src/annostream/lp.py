"""Streaming LP verification: min c.x subject to Ax <= b, x free.

The stream carries entries ``A i j v``, ``b i v`` and ``c j v``; duplicate
indices sum.  The helper sends an optimal primal ``x`` and an optimal dual
``y`` (``y <= 0``, ``A^T y = c``) and replays the instance twice: row by row
with each entry tagged with ``x_j``, and column by column with each entry
tagged with ``y_i``.  Every replay is fingerprinted linearly in the value,
so summed duplicates match, and the quoted ``x_j`` / ``y_i`` are checked for
consistency against the counts declared up front.

Annotation layout::

    CLAIM opt
    LP-X j c_j x_j cnt_j            (j = 1..c)
    LP-ROW i b_i                    (i = 1..b), then
    LP-ENTRY j A_ij x_j             (strictly increasing j)
    LP-DUAL-Y i b_i y_i cnt_i       (i = 1..b)
    LP-DUAL-ROW j c_j               (j = 1..c), then
    LP-DUAL-ENTRY i A_ij y_i        (strictly increasing i)
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Protocol, Value, Verifier, expect, register
from .field import rational_bound
from .stream import StreamHeader, T, Token

ZERO = Fraction(0)


@dataclass
class LPInstance:
    """``min c.x`` s.t. ``Ax <= b``; sparse, duplicates already summed."""

    nb: int
    nc: int
    A: dict = field(default_factory=dict)
    b: dict = field(default_factory=dict)
    c: dict = field(default_factory=dict)

    @classmethod
    def from_entries(cls, nb: int, nc: int, entries) -> "LPInstance":
        inst = cls(nb, nc)
        A, b, c = defaultdict(Fraction), defaultdict(Fraction), defaultdict(Fraction)
        for target, *rest in entries:
            if target == "A":
                A[rest[0], rest[1]] += rest[2]
            elif target == "b":
                b[rest[0]] += rest[1]
            else:
                c[rest[0]] += rest[1]
        inst.A = {k: v for k, v in A.items() if v}
        inst.b = {k: v for k, v in b.items() if v}
        inst.c = {k: v for k, v in c.items() if v}
        return inst

    @classmethod
    def from_stream(cls, header: StreamHeader, stream) -> "LPInstance":
        return cls.from_entries(header.b, header.c, ((t.tag, *t.args) for t in stream))

    def to_stream(self) -> tuple[StreamHeader, list[Token]]:
        toks = [T("A", i, j, v) for (i, j), v in sorted(self.A.items())]
        toks += [T("b", i, v) for i, v in sorted(self.b.items())]
        toks += [T("c", j, v) for j, v in sorted(self.c.items())]
        return StreamHeader("lp", {"b": self.nb, "c": self.nc, "m": len(toks)}), toks


# --- exact simplex --------------------------------------------------------------

class Infeasible(ValueError):
    pass


class Unbounded(ValueError):
    pass


def simplex(inst: LPInstance) -> tuple[Fraction, dict, dict]:
    """Two-phase tableau simplex in exact arithmetic with Bland's rule.

    Returns ``(opt, x, y)`` with ``y`` an optimal dual for the free-variable
    form, read off the slack columns' reduced costs.
    """
    nb, nc = inst.nb, inst.nc
    nx = 2 * nc
    N = nx + 2 * nb  # x+, x-, slacks, artificials
    rows = []
    for i in range(1, nb + 1):
        bi = inst.b.get(i, ZERO)
        sg = 1 if bi >= 0 else -1
        r = [ZERO] * (N + 1)
        for j in range(1, nc + 1):
            a = inst.A.get((i, j))
            if a:
                r[j - 1] = sg * a
                r[nc + j - 1] = -sg * a
        r[nx + i - 1] = Fraction(sg)
        r[nx + nb + i - 1] = Fraction(1)
        r[N] = sg * bi
        rows.append(r)
    basis = [nx + nb + i for i in range(nb)]

    def pivot(pr, pc):
        piv = rows[pr][pc]
        rows[pr] = [v / piv for v in rows[pr]]
        for k, r in enumerate(rows):
            if k != pr and r[pc]:
                f = r[pc]
                prow = rows[pr]
                rows[k] = [a - f * b for a, b in zip(r, prow)]
        basis[pr] = pc

    def run(cost, allowed):
        while True:
            red = [cost[k] - sum(cost[basis[i]] * rows[i][k] for i in range(nb))
                   for k in range(N)]
            enter = next((k for k in range(N) if allowed(k) and red[k] < 0), None)
            if enter is None:
                return red
            best = None
            for i in range(nb):
                a = rows[i][enter]
                if a > 0:
                    key = (rows[i][N] / a, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise Unbounded("objective unbounded below")
            pivot(best[1], enter)

    cost1 = [ZERO] * nx + [ZERO] * nb + [Fraction(1)] * nb
    run(cost1, lambda k: True)
    if sum(rows[i][N] for i in range(nb) if basis[i] >= nx + nb):
        raise Infeasible("no feasible point")
    for i in range(nb):
        if basis[i] >= nx + nb:
            k = next((k for k in range(nx + nb) if rows[i][k]), None)
            if k is not None:
                pivot(i, k)
    cost2 = [inst.c.get(j, ZERO) for j in range(1, nc + 1)]
    cost2 = cost2 + [-v for v in cost2] + [ZERO] * (2 * nb)
    red = run(cost2, lambda k: k < nx + nb)
    val = [ZERO] * N
    for i, k in enumerate(basis):
        val[k] = rows[i][N]
    x = {j: val[j - 1] - val[nc + j - 1] for j in range(1, nc + 1)}
    y = {i: -red[nx + i - 1] for i in range(1, nb + 1)}
    opt = sum((inst.c.get(j, ZERO) * x[j] for j in x), ZERO)
    return opt, x, y


# --- certificate ---------------------------------------------------------------

def lp_annotation(inst: LPInstance, x: dict, y: dict) -> list[Token]:
    x = {j: Fraction(x.get(j, 0)) for j in range(1, inst.nc + 1)}
    y = {i: Fraction(y.get(i, 0)) for i in range(1, inst.nb + 1)}
    opt = sum((inst.c.get(j, ZERO) * x[j] for j in x), ZERO)
    rows, cols = defaultdict(list), defaultdict(list)
    for (i, j), a in sorted(inst.A.items()):
        rows[i].append((j, a))
        cols[j].append((i, a))
    ann = [T("CLAIM", _canon(opt))]
    ann += [T("LP-X", j, _canon(inst.c.get(j, ZERO)), _canon(x[j]), len(cols[j]))
            for j in range(1, inst.nc + 1)]
    for i in range(1, inst.nb + 1):
        ann.append(T("LP-ROW", i, _canon(inst.b.get(i, ZERO))))
        ann += [T("LP-ENTRY", j, _canon(a), _canon(x[j])) for j, a in rows[i]]
    ann += [T("LP-DUAL-Y", i, _canon(inst.b.get(i, ZERO)), _canon(y[i]), len(rows[i]))
            for i in range(1, inst.nb + 1)]
    for j in range(1, inst.nc + 1):
        ann.append(T("LP-DUAL-ROW", j, _canon(inst.c.get(j, ZERO))))
        ann += [T("LP-DUAL-ENTRY", i, _canon(a), _canon(y[i])) for i, a in sorted(cols[j])]
    return ann


def _canon(v):
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else v


def lp_prove(inst: LPInstance) -> list[Token]:
    _, x, y = simplex(inst)
    return lp_annotation(inst, x, y)


# --- verifier -------------------------------------------------------------------

_PHASE = {"CLAIM": 0, "LP-X": 1, "LP-ROW": 2, "LP-ENTRY": 2, "LP-DUAL-Y": 3,
          "LP-DUAL-ROW": 4, "LP-DUAL-ENTRY": 4}


class LPCore(Verifier):
    """Shared LP certificate checker; subclasses map stream tokens to
    ``(target, i, [j,] value)`` entries and set the dimensions."""

    def setup(self, nb: int, nc: int) -> None:
        ctx = self.ctx
        self.nb, self.nc = nb, nc
        self.bound = rational_bound(ctx.field)
        qa, qb, qc = max(nb * nc, 1), max(nb, 1), max(nc, 1)
        self.sa, self.sb, self.sc = ctx.fingerprint(qa), ctx.fingerprint(qb), ctx.fingerprint(qc)
        self.ra, self.rb, self.rc = ctx.fingerprint(qa), ctx.fingerprint(qb), ctx.fingerprint(qc)
        self.ta, self.tb, self.tc = ctx.fingerprint(qa), ctx.fingerprint(qb), ctx.fingerprint(qc)
        self.x_claim, self.x_seen = ctx.pair_fingerprint(), ctx.pair_fingerprint()
        self.y_claim, self.y_seen = ctx.pair_fingerprint(), ctx.pair_fingerprint()
        self.phase = -1
        self.claim = None
        self.pobj = ZERO
        self.dobj = ZERO
        self.idx = 0       # current row (primal) or column (dual) of the replay
        self.count = 0     # LP-X / LP-DUAL-Y rows seen
        self.last = 0      # last entry index inside the current row or column
        self.acc = ZERO
        self.rhs = ZERO
        self.open = False

    def add(self, target: str, *args) -> None:
        """Fold one stream entry into the instance fingerprints."""
        if target == "A":
            i, j, v = args
            self.sa.update((i - 1) * self.nc + j, v)
        elif target == "b":
            self.sb.update(args[0], args[1])
        else:
            self.sc.update(args[0], args[1])

    def _val(self, v):
        v = Fraction(v)
        expect(abs(v.numerator) <= self.bound and v.denominator <= self.bound, "domain",
               f"value {v} exceeds the rational bound")
        return v

    def _close(self):
        if not self.open:
            return
        if self.phase == 2:
            expect(self.acc <= self.rhs, "infeasible-primal", f"row {self.idx}")
        else:
            expect(self.acc == self.rhs, "infeasible-dual", f"column {self.idx}")
        self.open = False

    def on_annotation(self, tok):
        tag, a = tok.tag, tok.args
        ph = _PHASE.get(tag)
        expect(ph is not None, "structure", f"unexpected {tag}")
        expect(ph >= self.phase and (tag != "CLAIM" or self.phase == -1), "structure",
               f"{tag} out of place")
        if ph != self.phase:
            self._enter(ph)
        if tag == "CLAIM":
            self.claim = self._val(a[0])
        elif tag == "LP-X":
            j, cj, xj, cnt = a
            self.count += 1
            expect(j == self.count and j <= self.nc, "structure", "LP-X rows must list 1..c")
            cj, xj = self._val(cj), self._val(xj)
            self.rc.update(j, cj)
            self.x_claim.update(j, xj, cnt)
            self.pobj += cj * xj
        elif tag == "LP-ROW":
            self._close()
            i, bi = a
            self.idx += 1
            expect(i == self.idx and i <= self.nb, "structure", "rows must be 1..b in order")
            bi = self._val(bi)
            self.rb.update(i, bi)
            self.rhs, self.acc, self.last, self.open = bi, ZERO, 0, True
        elif tag == "LP-ENTRY":
            j, aij, xj = a
            expect(self.open and self.last < j <= self.nc, "structure", "bad entry order")
            self.last = j
            aij, xj = self._val(aij), self._val(xj)
            self.ra.update((self.idx - 1) * self.nc + j, aij)
            self.x_seen.update(j, xj)
            self.acc += aij * xj
        elif tag == "LP-DUAL-Y":
            i, bi, yi, cnt = a
            self.count += 1
            expect(i == self.count and i <= self.nb, "structure", "LP-DUAL-Y rows must list 1..b")
            bi, yi = self._val(bi), self._val(yi)
            expect(yi <= 0, "infeasible-dual", f"y_{i} > 0")
            self.tb.update(i, bi)
            self.y_claim.update(i, yi, cnt)
            self.dobj += bi * yi
        elif tag == "LP-DUAL-ROW":
            self._close()
            j, cj = a
            self.idx += 1
            expect(j == self.idx and j <= self.nc, "structure", "columns must be 1..c in order")
            cj = self._val(cj)
            self.tc.update(j, cj)
            self.rhs, self.acc, self.last, self.open = cj, ZERO, 0, True
        else:
            i, aij, yi = a
            expect(self.open and self.last < i <= self.nb, "structure", "bad entry order")
            self.last = i
            aij, yi = self._val(aij), self._val(yi)
            self.ta.update((i - 1) * self.nc + self.idx, aij)
            self.y_seen.update(i, yi)
            self.acc += aij * yi

    def _enter(self, ph: int) -> None:
        """Close the current section and skip sections that must be empty."""
        self._close()
        done = {1: self.count == self.nc, 2: self.idx == self.nb, 3: self.count == self.nb,
                4: self.idx == self.nc}
        expect(done.get(self.phase, True), "structure", "section incomplete")
        for k in range(self.phase + 1, ph):
            expect(k != 0 and (self.nc if k in (1, 4) else self.nb) == 0, "structure",
                   "section missing")
        self.idx = self.count = 0
        self.phase = ph

    def extract(self, opt: Fraction):
        return opt

    def finish(self):
        expect(self.phase >= 0, "structure", "missing claim")
        self._enter(5)
        expect(self.sa == self.ra and self.sa == self.ta, "tamper", "A replay")
        expect(self.sb == self.rb and self.sb == self.tb, "tamper", "b replay")
        expect(self.sc == self.rc and self.sc == self.tc, "tamper", "c replay")
        expect(self.x_claim == self.x_seen, "tamper", "x quoted inconsistently")
        expect(self.y_claim == self.y_seen, "tamper", "y quoted inconsistently")
        expect(self.pobj == self.claim and self.dobj == self.claim, "gap",
               f"primal {self.pobj}, dual {self.dobj}, claim {self.claim}")
        return Value(_canon(self.extract(self.claim)))


class LPVerifier(LPCore):
    protocol = "lp"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        self.setup(header.b, header.c)

    def on_stream(self, tok):
        self.add(tok.tag, *tok.args)


# --- generation -----------------------------------------------------------------

def _rank(nb, nc, A) -> int:
    M = [[Fraction(A.get((i, j), 0)) for j in range(1, nc + 1)] for i in range(1, nb + 1)]
    r = 0
    for col in range(nc):
        piv = next((k for k in range(r, nb) if M[k][col]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for k in range(nb):
            if k != r and M[k][col]:
                f = M[k][col] / M[r][col]
                M[k] = [a - f * b for a, b in zip(M[k], M[r])]
        r += 1
    return r


def random_lp(rng: random.Random, nb: int, nc: int) -> LPInstance:
    """Feasible, bounded instance: b = A x0 + slack, c = A^T y0 with y0 <= 0,
    A of full column rank so the optimum sits at a vertex."""
    nc = min(nc, nb)
    while True:
        A = {}
        for i in range(1, nb + 1):
            for j in range(1, nc + 1):
                if rng.random() < 0.6:
                    v = Fraction(rng.randint(-5, 5), rng.choice((1, 1, 1, 2, 3)))
                    if v:
                        A[i, j] = v
        if _rank(nb, nc, A) == nc:
            break
    x0 = {j: Fraction(rng.randint(-3, 3)) for j in range(1, nc + 1)}
    y0 = {i: Fraction(-rng.randint(0, 3)) for i in range(1, nb + 1)}
    b = {i: sum((A.get((i, j), ZERO) * x0[j] for j in x0), ZERO) + rng.randint(0, 2)
         for i in range(1, nb + 1)}
    c = {j: sum((A.get((i, j), ZERO) * y0[i] for i in y0), ZERO) for j in range(1, nc + 1)}
    if rng.random() < 0.1:
        c = {}
    return LPInstance(nb, nc, A, {k: v for k, v in b.items() if v}, {k: v for k, v in c.items() if v})


def lp_stream(rng: random.Random, inst: LPInstance) -> tuple[StreamHeader, list[Token]]:
    """Shuffled stream; some entries are split into two summing pieces."""
    toks = []
    for (i, j), v in inst.A.items():
        if rng.random() < 0.2:
            part = Fraction(rng.randint(-3, 3))
            toks += [T("A", i, j, _canon(part)), T("A", i, j, _canon(v - part))]
        else:
            toks.append(T("A", i, j, _canon(v)))
    toks += [T("b", i, _canon(v)) for i, v in inst.b.items()]
    toks += [T("c", j, _canon(v)) for j, v in inst.c.items()]
    rng.shuffle(toks)
    return StreamHeader("lp", {"b": inst.nb, "c": inst.nc, "m": len(toks)}), toks


def fits_encoding(inst: LPInstance, field=None) -> bool:
    """Whether the honest certificate of ``inst`` is representable in the field."""
    from .field import F61
    B = rational_bound(field or F61)
    for tok in lp_prove(inst):
        for v in tok.args:
            v = Fraction(v)
            if abs(v.numerator) > B or v.denominator > B:
                return False
    return True


def _gen(rng: random.Random, size: int):
    nb = max(1, min(size, 8))
    nc = rng.randint(1, nb)
    while True:
        # vertices of dense 8x8 systems occasionally need denominators past the bound
        inst = random_lp(rng, nb, nc)
        if fits_encoding(inst):
            return lp_stream(rng, inst)


def _oracle(header, stream):
    from .oracles import lp_optimum
    inst = LPInstance.from_stream(header, stream)
    return Value(_canon(lp_optimum(inst.nb, inst.nc, inst.A, inst.b, inst.c)))


LP_SCHEMA = {"CLAIM": "v", "LP-X": "ivvk", "LP-ROW": "iv", "LP-ENTRY": "ivv",
             "LP-DUAL-Y": "ivvk", "LP-DUAL-ROW": "iv", "LP-DUAL-ENTRY": "ivv"}


register(Protocol(
    name="lp",
    verifier=LPVerifier,
    prove=lambda h, s: lp_prove(LPInstance.from_stream(h, s)),
    gen=_gen,
    oracle=_oracle,
    schema=LP_SCHEMA,
    node_bound=lambda h: max(h.b, h.c),
))
