"""Matrix-vector products with a space/annotation tradeoff, and its clients.

Columns ``j = 1..c`` are laid out on an ``h x v`` grid, ``h = ceil(c^alpha)``,
``v = ceil(c / h)``, with ``j -> (ceil(j / v), (j - 1) mod v + 1)``.  For each
row ``i`` let ``f_i(z, y)`` be the degree ``h - 1`` extension of row ``i`` in
the first coordinate and ``f_x(z, y)`` that of the vector.  Then

    s_i(z) = sum_y f_i(z, y) f_x(z, y)        (degree 2(h - 1))
    (Ax)_i = s_i(1) + ... + s_i(h).

The verifier keeps ``v`` slots ``FA[y] = sum_i alpha^i f_i(r, y)`` and ``v``
slots ``FX[y] = f_x(r, y)`` for a secret ``r``; the helper sends each
``s_i`` as its values at ``1..2h-1`` and the verifier checks
``sum_y FA[y] FX[y] = sum_i alpha^i s_i(r)`` at the end.

Annotation for one product::

    MV-POLY i [extra]      (i = 1..b in order; extra is protocol specific)
    MV-EVAL e              (2h - 1 rows: s_i(1), ..., s_i(2h - 1))

Clients: ``matvec`` (stream carries A and x), ``lptrade`` (both LP
feasibility passes), ``eigen`` (``Ax = lambda x`` for a helper-supplied x) and
``resistance`` (a grounded Laplacian system).
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import lcm

from .core import Accept, Protocol, Slots, Value, Verifier, expect, register
from .field import rational_bound
from .stream import StreamHeader, T, Token


def grid_dims(c: int, alpha) -> tuple[int, int]:
    """``h = ceil(c^alpha)`` computed exactly, and ``v = ceil(c / h)``."""
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    c = max(c, 1)
    a, b = alpha.numerator, alpha.denominator
    target = c ** a
    h = max(1, round(c ** float(alpha)) - 2)
    while h ** b < target:
        h += 1
    while h > 1 and (h - 1) ** b >= target:
        h -= 1
    return h, -(-c // h)


def grid_cell(j: int, v: int) -> tuple[int, int]:
    return (j - 1) // v + 1, (j - 1) % v + 1


class MatvecBank:
    """Verifier state for checking one product ``M w`` with ``M`` (rows x
    cols) streamed and the vector supplied by stream or annotation."""

    def __init__(self, ctx, rows: int, cols: int, alpha):
        # field, alpha and the row count are already held by ctx and header
        self._ctx = ctx
        self._rows = rows
        self.h, self.v = grid_dims(cols, alpha)
        if self.N + 1 >= ctx.field.p:
            raise ValueError("field too small for this grid")
        self.r = ctx.element(low=self.N + 1)
        self.fa = Slots([0] * self.v)
        self.fx = Slots([0] * self.v)
        self.lhs = 0
        self.row = 0
        self.open = False
        self.k = 0
        self.out = 0
        self.num = 0
        self.den = 1
        self.w = 0

    @property
    def F(self):
        return self._ctx.field

    @property
    def alpha(self) -> int:
        return self._ctx.alpha

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def N(self) -> int:
        return 2 * self.h - 1

    def chi(self, x: int) -> int:
        """Lagrange basis ``chi_x(r)`` over nodes ``1..h``; O(h) time."""
        p, r = self.F.p, self.r
        num = den = 1
        for x2 in range(1, self.h + 1):
            if x2 != x:
                num = num * (r - x2) % p
                den = den * (x - x2) % p
        return num * pow(den, -1, p) % p

    def add_entry(self, i: int, j: int, val) -> None:
        expect(1 <= i <= self.rows, "domain", f"row {i}")
        x, y = grid_cell(j, self.v)
        p = self.F.p
        self.fa[y - 1] = (self.fa[y - 1] + self.F.elem(val) * self.chi(x) % p
                          * pow(self.alpha, i, p)) % p

    def add_vec(self, j: int, val) -> None:
        x, y = grid_cell(j, self.v)
        p = self.F.p
        self.fx[y - 1] = (self.fx[y - 1] + self.F.elem(val) * self.chi(x)) % p

    def start_row(self, i: int) -> None:
        expect(not self.open and i == self.row + 1 and i <= self.rows, "structure",
               f"polynomial for row {i} out of order")
        self.row = i
        self.open = True
        p, N = self.F.p, self.N
        fact = 1
        for k in range(1, N):
            fact = fact * k % p
        self.w = (-1) ** (N - 1) * pow(fact, -1, p) % p
        self.out, self.num, self.den = 0, 0, 1

    def eval(self, e: int) -> None:
        expect(self.open and self.k < self.N, "structure", "too many evaluations")
        p = self.F.p
        self.k += 1
        k = self.k
        e %= p
        if k <= self.h:
            self.out = (self.out + e) % p
        d = (self.r - k) % p
        self.num = (self.num * d + e * self.w % p * self.den) % p
        self.den = self.den * d % p
        self.w = self.w * (-(self.N - k)) % p * pow(k, -1, p) % p

    def end_row(self) -> int:
        """Close the current row; returns ``(Mw)_row`` as a field element."""
        expect(self.open and self.k == self.N, "structure", "missing evaluations")
        p = self.F.p
        P = 1
        for k in range(1, self.N + 1):
            P = P * (self.r - k) % p
        s_r = P * self.num % p * pow(self.den, -1, p) % p
        self.lhs = (self.lhs + pow(self.alpha, self.row, p) * s_r) % p
        self.k = 0
        self.open = False
        return self.out

    def check(self) -> None:
        expect(self.row == self.rows and not self.open, "structure", "missing rows")
        p = self.F.p
        rhs = sum(a * b for a, b in zip(self.fa, self.fx)) % p
        expect(rhs == self.lhs, "schwartz-zippel")


def _chi_table(h: int, N: int, p: int) -> list[list[int]]:
    """``chi_x(z)`` for ``x = 1..h``, ``z = 1..N`` via barycentric weights."""
    fact = [1] * (h + 1)
    for k in range(1, h + 1):
        fact[k] = fact[k - 1] * k % p
    weight = [0] * (h + 1)
    for x in range(1, h + 1):
        weight[x] = (-1) ** (h - x) * pow(fact[x - 1] * fact[h - x], -1, p) % p
    chi = [[0] * (N + 1) for _ in range(h + 1)]
    for x in range(1, h + 1):
        chi[x][x] = 1
    for z in range(h + 1, N + 1):
        P = 1
        for x in range(1, h + 1):
            P = P * (z - x) % p
        for x in range(1, h + 1):
            chi[x][z] = P * weight[x] % p * pow(z - x, -1, p) % p
    return chi


def matvec_evals(rows: int, cols: int, alpha, entries, vec: dict, p: int) -> dict[int, list[int]]:
    """Honest ``s_i`` values at ``1..2h-1`` for every row."""
    h, v = grid_dims(cols, alpha)
    N = 2 * h - 1
    chi = _chi_table(h, N, p)
    fx = [[0] * (N + 1) for _ in range(v + 1)]
    for j, val in vec.items():
        x, y = grid_cell(j, v)
        val %= p
        if val:
            row = fx[y]
            cx = chi[x]
            row[x] = (row[x] + val) % p
            for z in range(h + 1, N + 1):
                row[z] = (row[z] + val * cx[z]) % p
    out = {i: [0] * (N + 1) for i in range(1, rows + 1)}
    for i, j, val in entries:
        x, y = grid_cell(j, v)
        val %= p
        s, fy, cx = out[i], fx[y], chi[x]
        s[x] = (s[x] + val * fy[x]) % p
        for z in range(h + 1, N + 1):
            s[z] = (s[z] + val * cx[z] % p * fy[z]) % p
    return {i: s[1:] for i, s in out.items()}


def iter_matvec_tokens(rows, cols, alpha, entries, vec, p, extra=None):
    evals = matvec_evals(rows, cols, alpha, entries, vec, p)
    for i in range(1, rows + 1):
        yield T("MV-POLY", i, *(extra(i) if extra else ()))
        for e in evals[i]:
            yield T("MV-EVAL", e)


def matvec_tokens(rows, cols, alpha, entries, vec, p, extra=None) -> list[Token]:
    return list(iter_matvec_tokens(rows, cols, alpha, entries, vec, p, extra))


MV_SCHEMA = {"MV-POLY": "iv", "MV-EVAL": "v"}


# --- matvec ---------------------------------------------------------------------

class MatvecVerifier(Verifier):
    """Streams ``M i j v`` and ``x j v``; outputs ``Ax`` row by row."""

    protocol = "matvec"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        self.bank = MatvecBank(ctx, header.b, header.c, header.get("alpha", Fraction(1, 2)))

    def on_stream(self, tok):
        if tok.tag == "M":
            self.bank.add_entry(*tok.args)
        else:
            self.bank.add_vec(*tok.args)

    def on_annotation(self, tok):
        if tok.tag == "MV-POLY":
            if self.bank.open:
                self.emit(self.F.signed(self.bank.end_row()))
            self.bank.start_row(tok.args[0])
        elif tok.tag == "MV-EVAL":
            self.bank.eval(tok.args[0])
        else:
            expect(False, "structure", f"unexpected {tok.tag}")

    def finish(self):
        if self.bank.open:
            self.emit(self.F.signed(self.bank.end_row()))
        self.bank.check()
        return Value(self.emitted())


def _matrix_parts(stream):
    entries = [tuple(t.args) for t in stream if t.tag == "M"]
    vec: dict = {}
    for t in stream:
        if t.tag == "x":
            vec[t.args[0]] = vec.get(t.args[0], 0) + t.args[1]
    return entries, vec


def matvec_prove(header, stream, p=None) -> list[Token]:
    from .field import default_prime
    p = p or default_prime()
    entries, vec = _matrix_parts(stream)
    return matvec_tokens(header.b, header.c, header.get("alpha", Fraction(1, 2)), entries, vec, p)


def random_matrix_stream(rng: random.Random, b: int, c: int, alpha, nnz: int,
                         vmax: int = 1 << 20) -> tuple[StreamHeader, list[Token]]:
    toks = [T("M", rng.randint(1, b), rng.randint(1, c), rng.randint(-vmax, vmax))
            for _ in range(nnz)]
    toks += [T("x", j, rng.randint(-vmax, vmax)) for j in range(1, c + 1) if rng.random() < 0.9]
    rng.shuffle(toks)
    return StreamHeader("matrix", {"b": b, "c": c, "alpha": Fraction(alpha), "m": len(toks)}), toks


def _gen_matvec(rng, size):
    b, c = rng.randint(1, max(size, 1)), rng.randint(1, max(size, 1))
    alpha = rng.choice((0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1))
    return random_matrix_stream(rng, b, c, alpha, rng.randint(0, 2 * b * c))


def _oracle_matvec(header, stream):
    from .oracles import matvec
    entries, vec = _matrix_parts(stream)
    return Value(tuple(matvec(header.b, header.c, entries, vec.items())))


register(Protocol(
    name="matvec",
    verifier=MatvecVerifier,
    prove=matvec_prove,
    gen=_gen_matvec,
    oracle=_oracle_matvec,
    schema=MV_SCHEMA,
    canonical=True,
    wrong_answer=lambda toks, rng: _bump_eval(toks, rng, within_h=True),
    node_bound=lambda h: max(h.b, h.c),
))


def _bump_eval(tokens, rng, within_h=False):
    """Shift one of the summed evaluations, i.e. change one output value."""
    idx = [i for i, t in enumerate(tokens) if t.tag == "MV-EVAL"]
    if not idx:
        return None
    i = rng.choice(idx[:1] if within_h else idx)
    out = list(tokens)
    out[i] = T("MV-EVAL", tokens[i].args[0] + rng.choice((-1, 1)) * rng.randint(1, 3))
    return out


# --- LP with the tradeoff -------------------------------------------------------

class LPTradeVerifier(Verifier):
    """``min c.x`` s.t. ``Ax <= b`` over integer data, in ``O(c^(1-alpha))``
    words for square-ish ``A``.

    Annotation::

        CLAIM opt
        LPT-X d                 common denominator of the primal, d > 0
        LPT-XJ j c_j X_j        (j = 1..nc; x = X / d)
        MV-POLY i b_i + evals   (rows of AX; checks (AX)_i <= d b_i)
        LPT-Y e                 common denominator of the dual, e > 0
        LPT-YI i b_i Y_i        (i = 1..nb; y = Y / e, Y <= 0)
        MV-POLY j c_j + evals   (rows of A^T Y; checks (A^T Y)_j = e c_j)

    Quoted ``b`` and ``c`` values are replayed against stream fingerprints.
    Products are lifted from the field to the integers; this is exact
    because the running masses ``sum |A|``, ``sum |b|``, ``sum |c|`` times
    the largest ``|X|``, ``|Y|``, ``d``, ``e`` are kept below ``p / 2``.
    """

    protocol = "lptrade"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        nb, nc = header.b, header.c
        alpha = header.get("alpha", Fraction(1, 2))
        self.primal = MatvecBank(ctx, nb, nc, alpha)
        self.dual = MatvecBank(ctx, nc, nb, alpha)
        self.sb, self.sc = ctx.fingerprint(max(nb, 1)), ctx.fingerprint(max(nc, 1))
        self.rb = [ctx.fingerprint(max(nb, 1)) for _ in range(2)]
        self.rc = [ctx.fingerprint(max(nc, 1)) for _ in range(2)]
        self.mass_a = self.mass_b = self.mass_c = 0
        self.big = 0
        self.phase = -1
        self.claim = None
        self.d = self.e = None
        self.nx = self.ny = 0
        self.obj_p = self.obj_d = 0
        self.quoted = 0

    def on_stream(self, tok):
        tag, a = tok.tag, tok.args
        expect(isinstance(a[-1], int), "domain", "integer data only")
        if tag == "A":
            self.mass_a += abs(a[2])
            self.primal.add_entry(a[0], a[1], a[2])
            self.dual.add_entry(a[1], a[0], a[2])
        elif tag == "b":
            self.mass_b += abs(a[1])
            self.sb.update(a[0], a[1])
        else:
            self.mass_c += abs(a[1])
            self.sc.update(a[0], a[1])

    def _int(self, v):
        expect(isinstance(v, int), "domain", "integer expected")
        self.big = max(self.big, abs(v))
        return v

    def _close(self):
        F = self.F
        if self.primal.open:
            i = self.primal.row
            got = F.signed(self.primal.end_row())
            expect(got <= self.d * self.quoted, "infeasible-primal", f"row {i}")
        elif self.dual.open:
            j = self.dual.row
            got = F.signed(self.dual.end_row())
            expect(got == self.e * self.quoted, "infeasible-dual", f"column {j}")

    _PHASE = {"CLAIM": 0, "LPT-X": 1, "LPT-XJ": 2, "LPT-Y": 4, "LPT-YI": 5}

    def _enter(self, ph: int) -> None:
        """Move to phase ``ph``; sections skipped on the way must be empty."""
        nb, nc = self.header.b, self.header.c
        size = {0: 1, 1: 1, 2: nc, 3: nb, 4: 1, 5: nb, 6: nc}
        expect(ph >= self.phase, "structure", "section out of order")
        if ph == self.phase:
            expect(ph in (2, 3, 5, 6), "structure", "repeated section")
            return
        self._close()
        for skipped in range(self.phase + 1, ph):
            expect(size[skipped] == 0, "structure", f"missing section {skipped}")
        expect(self.nx == nc or ph <= 2, "structure", "primal incomplete")
        expect(self.ny == nb or ph <= 5, "structure", "dual incomplete")
        self.phase = ph

    def on_annotation(self, tok):
        tag, a = tok.tag, tok.args
        if tag == "MV-POLY":
            self._enter(3 if self.phase <= 3 else 6)
        elif tag != "MV-EVAL":
            expect(tag in self._PHASE, "structure", f"unexpected {tag}")
            self._enter(self._PHASE[tag])
        if tag == "CLAIM":
            self.claim = a[0]
        elif tag in ("LPT-X", "LPT-Y"):
            expect(self._int(a[0]) > 0, "degenerate", "denominator must be positive")
            if tag == "LPT-X":
                self.d = a[0]
            else:
                self.e = a[0]
        elif tag == "LPT-XJ":
            j, cj, xj = a
            expect(j == self.nx + 1 and j <= self.header.c, "structure", "LPT-XJ order")
            self.nx = j
            self.primal.add_vec(j, self._int(xj))
            self.rc[0].update(j, self._int(cj))
            self.obj_p = (self.obj_p + self.F.elem(cj * xj)) % self.F.p
        elif tag == "LPT-YI":
            i, bi, yi = a
            expect(i == self.ny + 1 and i <= self.header.b, "structure", "LPT-YI order")
            expect(self._int(yi) <= 0, "infeasible-dual", "y must be non-positive")
            self.ny = i
            self.dual.add_vec(i, yi)
            self.rb[1].update(i, self._int(bi))
            self.obj_d = (self.obj_d + self.F.elem(bi * yi)) % self.F.p
        elif tag == "MV-POLY":
            self._close()
            idx, q = a
            if self.phase == 3:
                self.primal.start_row(idx)
                self.rb[0].update(idx, self._int(q))
            else:
                self.dual.start_row(idx)
                self.rc[1].update(idx, self._int(q))
            self.quoted = q
        else:
            expect(self.phase in (3, 6), "structure", "MV-EVAL out of place")
            (self.primal if self.phase == 3 else self.dual).eval(a[0])

    def finish(self):
        self._enter(7)
        self.primal.check()
        self.dual.check()
        expect(self.sb == self.rb[0] and self.sb == self.rb[1], "tamper", "b replay mismatch")
        expect(self.sc == self.rc[0] and self.sc == self.rc[1], "tamper", "c replay mismatch")
        half = self.F.p // 2
        mass = max(self.mass_a, self.mass_b, self.mass_c, 1)
        expect(mass * max(self.big, 1) * max(self.header.b, self.header.c, 1) < half, "domain",
               "values too large to lift from the field")
        F = self.F
        claim = Fraction(self.claim)
        expect(Fraction(F.signed(self.obj_p), self.d) == claim, "gap", "primal objective")
        expect(Fraction(F.signed(self.obj_d), self.e) == claim, "gap", "dual objective")
        return Value(_canon(claim))


def _canon(v):
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else v


def lptrade_prove(header, stream, p=None) -> list[Token]:
    from .field import default_prime
    from .lp import LPInstance, simplex
    p = p or default_prime()
    inst = LPInstance.from_stream(header, stream)
    nb, nc = inst.nb, inst.nc
    opt, x, y = simplex(inst)
    x = [Fraction(x.get(j, 0)) for j in range(1, nc + 1)]
    y = [Fraction(y.get(i, 0)) for i in range(1, nb + 1)]
    d = lcm(1, *(v.denominator for v in x))
    e = lcm(1, *(v.denominator for v in y))
    X = [int(v * d) for v in x]
    Y = [int(v * e) for v in y]
    b = [int(inst.b.get(i, 0)) for i in range(1, nb + 1)]
    c = [int(inst.c.get(j, 0)) for j in range(1, nc + 1)]
    alpha = header.get("alpha", Fraction(1, 2))
    entries = [tuple(t.args) for t in stream if t.tag == "A"]
    ann = [T("CLAIM", _canon(opt)), T("LPT-X", d)]
    ann += [T("LPT-XJ", j, c[j - 1], X[j - 1]) for j in range(1, nc + 1)]
    ann += matvec_tokens(nb, nc, alpha, entries, {j: X[j - 1] for j in range(1, nc + 1)}, p,
                         extra=lambda i: (b[i - 1],))
    ann += [T("LPT-Y", e)]
    ann += [T("LPT-YI", i, b[i - 1], Y[i - 1]) for i in range(1, nb + 1)]
    ann += matvec_tokens(nc, nb, alpha, [(j, i, v) for i, j, v in entries],
                         {i: Y[i - 1] for i in range(1, nb + 1)}, p, extra=lambda j: (c[j - 1],))
    return ann


def random_integer_lp(rng: random.Random, nb: int, nc: int):
    """Integer LP with a unique, strictly complementary optimum."""
    from .lp import LPInstance, _rank
    nc = max(1, min(nc, nb))
    while True:
        A = {(i, j): v for i in range(1, nb + 1) for j in range(1, nc + 1)
             if rng.random() < 0.6 and (v := rng.randint(-5, 5))}
        basis = sorted(rng.sample(range(1, nb + 1), nc))
        sub = {(basis.index(i) + 1, j): v for (i, j), v in A.items() if i in basis}
        if _rank(nc, nc, sub) == nc:
            break
    x0 = {j: rng.randint(-3, 3) for j in range(1, nc + 1)}
    y0 = {i: (-rng.randint(1, 3) if i in basis else 0) for i in range(1, nb + 1)}
    b = {i: sum(A.get((i, j), 0) * x0[j] for j in x0) + (0 if i in basis else rng.randint(1, 3))
         for i in range(1, nb + 1)}
    c = {j: sum(A.get((i, j), 0) * y0[i] for i in y0) for j in range(1, nc + 1)}
    return LPInstance(nb, nc, A, {k: v for k, v in b.items() if v}, {k: v for k, v in c.items() if v})


def _gen_lptrade(rng: random.Random, size: int):
    from .lp import lp_stream
    nb = max(1, min(size, 8))
    h, toks = lp_stream(rng, random_integer_lp(rng, nb, rng.randint(1, nb)))
    toks = [t for t in toks if all(isinstance(v, int) for v in t.args)]
    h = StreamHeader("lp", {**h.params, "alpha": rng.choice((0, Fraction(1, 2), 1)),
                            "m": len(toks)})
    return h, toks


def _oracle_lptrade(header, stream):
    from .lp import LPInstance
    from .oracles import lp_optimum
    inst = LPInstance.from_stream(header, stream)
    return Value(_canon(lp_optimum(inst.nb, inst.nc, inst.A, inst.b, inst.c)))


register(Protocol(
    name="lptrade",
    verifier=LPTradeVerifier,
    prove=lptrade_prove,
    gen=_gen_lptrade,
    oracle=_oracle_lptrade,
    schema={"CLAIM": "v", "LPT-X": "v", "LPT-XJ": "ivv", "LPT-Y": "v", "LPT-YI": "ivv",
            **MV_SCHEMA},
    canonical=True,
    node_bound=lambda h: max(h.b, h.c),
))


# --- eigenpairs -----------------------------------------------------------------

def _entries_from_stream(header, stream) -> list[tuple]:
    """Matrix entries from ``M`` tokens or, for graphs, adjacency/Laplacian."""
    mode = header.get("mode", "matrix")
    out = []
    for t in stream:
        if t.tag == "M":
            out.append(tuple(t.args))
        elif t.tag == "e":
            u, v = t.args[:2]
            w = t.args[2] if len(t.args) > 2 else 1
            if mode == "adj":
                out.append((u, v, w))
                if u != v:
                    out.append((v, u, w))
            elif u != v:
                out += [(u, u, w), (v, v, w), (u, v, -w), (v, u, -w)]
    return out


class EigenVerifier(Verifier):
    """Accepts iff the helper's ``x != 0`` satisfies ``Ax = lambda x``."""

    protocol = "eigen"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        n = self.n = header.n
        self.lam = header.lam
        self.bank = MatvecBank(ctx, n, n, header.get("alpha", Fraction(1, 2)))
        self.fx = ctx.fingerprint(max(n, 1))
        self.fy = ctx.fingerprint(max(n, 1))
        self.nx = 0
        self.nonzero = False

    def on_stream(self, tok):
        for i, j, w in _entries_from_stream(self.header, [tok]):
            self.bank.add_entry(i, j, w)

    def on_annotation(self, tok):
        tag, a = tok.tag, tok.args
        if tag == "EIG-X":
            j, xj = a
            expect(self.bank.row == 0 and j == self.nx + 1 and j <= self.n, "structure",
                   "EIG-X rows must list 1..n first")
            self.nx = j
            self.bank.add_vec(j, xj)
            self.fx.update(j, xj)
            self.nonzero |= xj % self.F.p != 0
        elif tag == "MV-POLY":
            expect(self.nx == self.n, "structure", "vector incomplete")
            self._close()
            self.bank.start_row(a[0])
        elif tag == "MV-EVAL":
            self.bank.eval(a[0])
        else:
            expect(False, "structure", f"unexpected {tag}")

    def _close(self):
        if self.bank.open:
            self.fy.update(self.bank.row, self.bank.end_row())

    def finish(self):
        expect(self.nx == self.n, "structure", "vector incomplete")
        self._close()
        self.bank.check()
        expect(self.nonzero, "degenerate", "x = 0")
        expect(self.fy == self.fx.scale(self.lam), "not-eigen", "Ax differs from lambda x")
        return Accept()


def nullspace_vector(n: int, entries, lam) -> list[int] | None:
    """An integer vector with ``(A - lam I) x = 0``, by exact elimination."""
    M = [[Fraction(0)] * n for _ in range(n)]
    for i, j, v in entries:
        M[i - 1][j - 1] += v
    for i in range(n):
        M[i][i] -= lam
    pivots = []
    r = 0
    for col in range(n):
        piv = next((k for k in range(r, n) if M[k][col]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pv = M[r][col]
        M[r] = [a / pv for a in M[r]]
        for k in range(n):
            if k != r and M[k][col]:
                f = M[k][col]
                M[k] = [a - f * b for a, b in zip(M[k], M[r])]
        pivots.append(col)
        r += 1
    free = next((c for c in range(n) if c not in pivots), None)
    if free is None:
        return None
    x = [Fraction(0)] * n
    x[free] = Fraction(1)
    for row, col in enumerate(pivots):
        x[col] = -M[row][free]
    d = lcm(*(v.denominator for v in x))
    return [int(v * d) for v in x]


def eigen_prove(header, stream, p=None) -> list[Token]:
    from .field import default_prime
    p = p or default_prime()
    n = header.n
    entries = _entries_from_stream(header, stream)
    x = nullspace_vector(n, entries, header.lam)
    if x is None:
        raise ValueError("lambda is not an eigenvalue")
    ann = [T("EIG-X", j, x[j - 1]) for j in range(1, n + 1)]
    vec = {j: x[j - 1] for j in range(1, n + 1)}
    return ann + matvec_tokens(n, n, header.get("alpha", Fraction(1, 2)), entries, vec, p)


def _gen_eigen(rng: random.Random, size: int):
    n = max(1, min(size, 24))
    alpha = rng.choice((0, Fraction(1, 2), Fraction(3, 4)))
    if rng.random() < 0.3 and n >= 2:
        # graph Laplacian: 0 is always an eigenvalue (constant vector)
        m = rng.randint(1, 2 * n)
        toks = [T("e", rng.randint(1, n), rng.randint(1, n)) for _ in range(m)]
        return StreamHeader("matrix", {"n": n, "b": n, "c": n, "mode": "lap", "lam": 0,
                                       "alpha": alpha, "m": m}), toks
    lam = rng.randint(-5, 5)
    x = [rng.randint(-3, 3) for _ in range(n)]
    k = rng.randrange(n)
    x[k] = rng.choice((-1, 1))
    A = {(i, j): rng.randint(-4, 4) for i in range(1, n + 1) for j in range(1, n + 1)
         if j != k + 1 and rng.random() < 0.5}
    for i in range(1, n + 1):
        rest = sum(A.get((i, j), 0) * x[j - 1] for j in range(1, n + 1) if j != k + 1)
        A[i, k + 1] = (lam * x[i - 1] - rest) * x[k]
    toks = [T("M", i, j, v) for (i, j), v in A.items() if v]
    rng.shuffle(toks)
    return StreamHeader("matrix", {"n": n, "b": n, "c": n, "lam": lam, "alpha": alpha,
                                   "m": len(toks)}), toks


def _oracle_eigen(header, stream):
    from .oracles import is_eigenpair
    ok = is_eigenpair(header.n, _entries_from_stream(header, stream), header.lam)
    return Accept() if ok else None


register(Protocol(
    name="eigen",
    verifier=EigenVerifier,
    prove=eigen_prove,
    gen=_gen_eigen,
    oracle=_oracle_eigen,
    schema={"EIG-X": "iv", **MV_SCHEMA},
    # any vector of the eigenspace is a valid x
    canonical=False,
    wrong_answer=lambda toks, rng: _bump_eval(toks, rng),
    node_bound=lambda h: h.n,
))


# --- effective resistance -------------------------------------------------------

class ResistanceVerifier(Verifier):
    """Grounds ``t``; checks ``L' xhat = d e_s`` and outputs ``xhat_s / d``."""

    protocol = "resistance"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        n = self.n = header.n
        self.s, self.t = header.s, header.t
        self.bank = MatvecBank(ctx, n, n, header.get("alpha", Fraction(1, 2)))
        self.bound = rational_bound(ctx.field)
        self.d = None
        self.nx = 0
        self.xs = 0

    def on_stream(self, tok):
        u, v, w = tok.args
        if u == v:
            return
        t = self.t
        for i, j, val in ((u, u, w), (v, v, w), (u, v, -w), (v, u, -w)):
            if i != t and j != t:
                self.bank.add_entry(i, j, val)

    def on_annotation(self, tok):
        tag, a = tok.tag, tok.args
        if tag == "RES-D":
            expect(self.d is None and self.nx == 0, "structure", "RES-D must come first")
            expect(0 < a[0] <= self.bound, "degenerate", "d must be positive and bounded")
            self.d = a[0]
        elif tag == "RES-XHAT":
            j, xj = a
            expect(self.d is not None and self.bank.row == 0, "structure", "RES-XHAT misplaced")
            expect(j == self.nx + 1 and j <= self.n, "structure", "RES-XHAT rows must list 1..n")
            expect(abs(xj) <= self.bound, "domain", "potential out of range")
            expect(j != self.t or xj == 0, "structure", "grounded node must be 0")
            self.nx = j
            self.bank.add_vec(j, xj)
            if j == self.s:
                self.xs = xj
        elif tag == "MV-POLY":
            expect(self.nx == self.n, "structure", "potentials incomplete")
            self._close()
            self.bank.start_row(a[0])
        elif tag == "MV-EVAL":
            self.bank.eval(a[0])
        else:
            expect(False, "structure", f"unexpected {tag}")

    def _close(self):
        if self.bank.open:
            i = self.bank.row
            got = self.bank.end_row()
            want = self.F.elem(self.d if i == self.s else 0)
            expect(got == want, "not-solution", f"row {i} of L' xhat")

    def finish(self):
        expect(self.nx == self.n, "structure", "potentials incomplete")
        self._close()
        self.bank.check()
        r = Fraction(self.xs, self.d)
        return Value(r.numerator if r.denominator == 1 else r)


def resistance_solution(n: int, edges, s: int, t: int) -> tuple[int, list[int]]:
    """Integer ``d`` and ``xhat`` with ``L' xhat = d e_s`` (``t`` grounded)."""
    L = [[Fraction(0)] * n for _ in range(n)]
    for u, v, w in edges:
        if u != v:
            L[u - 1][u - 1] += w
            L[v - 1][v - 1] += w
            L[u - 1][v - 1] -= w
            L[v - 1][u - 1] -= w
    keep = [i for i in range(n) if i != t - 1]
    M = [[L[i][j] for j in keep] + [Fraction(int(i == s - 1))] for i in keep]
    k = len(keep)
    for col in range(k):
        piv = next((r for r in range(col, k) if M[r][col]), None)
        if piv is None:
            raise ValueError("graph is disconnected")
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [a / pv for a in M[col]]
        for r in range(k):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    x = [Fraction(0)] * n
    for idx, i in enumerate(keep):
        x[i] = M[idx][k]
    d = lcm(*(v.denominator for v in x))
    return d, [int(v * d) for v in x]


def resistance_prove(header, stream, p=None) -> list[Token]:
    from .field import default_prime
    p = p or default_prime()
    n, s, t = header.n, header.s, header.t
    edges = [tuple(tk.args) for tk in stream]
    d, xhat = resistance_solution(n, edges, s, t)
    ann = [T("RES-D", d)] + [T("RES-XHAT", j, xhat[j - 1]) for j in range(1, n + 1)]
    entries = []
    for u, v, w in edges:
        if u != v:
            entries += [(i, j, val) for i, j, val in ((u, u, w), (v, v, w), (u, v, -w), (v, u, -w))
                        if i != t and j != t]
    vec = {j: xhat[j - 1] for j in range(1, n + 1)}
    return ann + matvec_tokens(n, n, header.get("alpha", Fraction(1, 2)), entries, vec, p)


def _gen_resistance(rng: random.Random, size: int):
    from .graphs import connected_graph, graph_stream
    n = max(2, min(size, 16))
    edges = [(u, v, rng.randint(1, 3)) for u, v in connected_graph(rng, n, rng.randint(n - 1, 2 * n),
                                                                    simple=False)]
    s, t = rng.sample(range(1, n + 1), 2)
    alpha = rng.choice((0, Fraction(1, 2)))
    return graph_stream("wgraph", n, edges, s=s, t=t, alpha=alpha)


def _oracle_resistance(header, stream):
    from .oracles import effective_resistance
    r = effective_resistance(header.n, [tuple(t.args) for t in stream], header.s, header.t)
    return Value(r.numerator if r.denominator == 1 else r)


register(Protocol(
    name="resistance",
    verifier=ResistanceVerifier,
    prove=resistance_prove,
    gen=_gen_resistance,
    oracle=_oracle_resistance,
    schema={"RES-D": "v", "RES-XHAT": "iv", **MV_SCHEMA},
    canonical=True,
    wrong_answer=lambda toks, rng: _scale_d(toks, rng),
    node_bound=lambda h: h.n,
))


def _scale_d(tokens, rng):
    """Claim a different resistance by changing the common denominator."""
    out = list(tokens)
    for i, t in enumerate(out):
        if t.tag == "RES-D":
            out[i] = T("RES-D", t.args[0] + rng.randint(1, 3))
            return out
    return None
