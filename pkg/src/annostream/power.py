"""Matrix powers and graph diameter.

With ``B = I + A`` the diameter of a connected graph is the least ``l`` such
that every entry of ``B^l`` is nonzero.  The helper claims ``l``, names a
cell ``(u, v)`` that is zero in ``B^(l-1)`` and proves both powers by
repeated squaring.

Every matrix is fingerprinted by its low-degree extension at a secret point
``(r1, r2)``.  One product step ``Z = X Y`` replays, for ``k = 1..n``,
column ``k`` of ``X`` and then row ``k`` of ``Y``.  The verifier checks the
replays against the fingerprints it already trusts and obtains the new one
from ``Z(r1, r2) = sum_k X(r1, k) Y(k, r2)``.

Annotation::

    CLAIM l
    POW-ZERO-CELL u v                       (when l >= 1)
    POW-LEVEL i op                          (op 0 = square, 1 = multiply by B)
    POW-ENTRY x                             (2 n^2 values per step)
    POW-LEVEL i 2                           final row-major replay of B^l
    POW-ENTRY x                             (n^2 values, all nonzero)

The squaring schedule follows the binary expansion of ``l - 1`` and ends
with one multiplication by ``B``; the zero cell is checked while ``B^(l-1)``
is replayed in that last step.
"""

from __future__ import annotations

import random

from .core import Protocol, Value, Verifier, expect, register
from .stream import T, Token

SQUARE, MULTIPLY, FINAL = 0, 1, 2


def schedule(l: int) -> list[int]:
    """Product steps taking ``B`` to ``B^l`` (``l >= 2``), the last being a
    multiplication whose left factor is ``B^(l-1)``."""
    ops = []
    for bit in bin(l - 1)[3:]:
        ops.append(SQUARE)
        if bit == "1":
            ops.append(MULTIPLY)
    return ops + [MULTIPLY]


class _Lagrange:
    """Walks ``chi_1(r), chi_2(r), ...`` over nodes ``1..n`` in O(1) words."""

    def __init__(self, n: int, r: int, p: int):
        self.n, self.r, self.p = n, r, p
        P = 1
        for k in range(1, n + 1):
            P = P * (r - k) % p
        self.P = P
        fact = 1
        for k in range(1, n):
            fact = fact * k % p
        self.w1 = (-1) ** (n - 1) * pow(fact, -1, p) % p
        self.j = 0
        self.w = 0

    def next(self) -> int:
        p, n = self.p, self.n
        if self.j == n:
            self.j = 0
        if self.j == 0:
            self.w = self.w1
        else:
            self.w = self.w * -(n - self.j) % p * pow(self.j, -1, p) % p
        self.j += 1
        return self.w * self.P % p * pow(self.r - self.j, -1, p) % p


def chi(n: int, j: int, r: int, p: int) -> int:
    num = den = 1
    for k in range(1, n + 1):
        if k != j:
            num = num * (r - k) % p
            den = den * (j - k) % p
    return num * pow(den, -1, p) % p


class DiameterVerifier(Verifier):
    protocol = "diameter"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        n = self.n = header.n
        p = ctx.field.p
        self.r1 = ctx.element(low=n + 1)
        self.r2 = ctx.element(low=n + 1)
        self.identity = 0
        w1, w2 = _Lagrange(n, self.r1, p), _Lagrange(n, self.r2, p)
        for _ in range(n):
            self.identity = (self.identity + w1.next() * w2.next()) % p
        self.fb = self.identity
        self.l = None
        self.cell = None
        self.step = 0
        self.op = None
        self.pos = 0
        self.cur = None
        self.nxt = 0
        self.chk_x = self.chk_y = 0
        self.xk = self.yk = 0
        self.walk_j1 = _Lagrange(n, self.r1, p)
        self.walk_j2 = _Lagrange(n, self.r2, p)
        self.walk_k1 = _Lagrange(n, self.r1, p)
        self.walk_k2 = _Lagrange(n, self.r2, p)
        self.ck1 = self.ck2 = 0
        self.zeros = 0

    def on_stream(self, tok):
        u, v = tok.args[:2]
        p, n = self.F.p, self.n
        self.fb = (self.fb + chi(n, u, self.r1, p) * chi(n, v, self.r2, p)
                   + chi(n, v, self.r1, p) * chi(n, u, self.r2, p)) % p

    # the step schedule is recomputed from l rather than stored
    def _op(self, i: int) -> int:
        if self.l <= 1:
            return FINAL
        sched = schedule(self.l)
        return sched[i - 1] if i <= len(sched) else FINAL

    def _steps(self) -> int:
        return 0 if self.l <= 1 else len(schedule(self.l))

    def on_annotation(self, tok):
        tag, a = tok.tag, tok.args
        if tag == "CLAIM":
            expect(self.l is None, "structure", "repeated CLAIM")
            expect(isinstance(a[0], int) and a[0] >= 0, "domain", "claim must be a non-negative integer")
            self.l = a[0]
            self.cur = self.fb
        elif tag == "POW-ZERO-CELL":
            expect(self.l is not None and self.l >= 1 and self.cell is None and self.step == 0,
                   "structure", "POW-ZERO-CELL misplaced")
            u, v = a
            expect(1 <= u <= self.n and 1 <= v <= self.n, "domain", "cell out of range")
            if self.l == 1:
                expect((u, v) == (2, 1), "not-diameter", "the first zero of B^0 = I is (2, 1)")
            self.cell = (u, v)
        elif tag == "POW-LEVEL":
            expect(self.l is not None and (self.l == 0 or self.cell is not None), "structure",
                   "claim and zero cell must come first")
            self._end_step()
            i, op = a
            expect(i == self.step + 1 and op == self._op(i), "structure", "unexpected step")
            expect(self.op != FINAL, "structure", "steps after the final replay")
            self.step, self.op, self.pos = i, op, 0
            self.nxt = self.chk_x = self.chk_y = 0
            if op == FINAL and self.l == 0:
                self.cur = self.identity
            elif op == FINAL and self.l == 1:
                self.cur = self.fb
        elif tag == "POW-ENTRY":
            expect(self.op is not None, "structure", "entry before POW-LEVEL")
            self._entry(a[0])
        else:
            expect(False, "structure", f"unexpected {tag}")

    def _entry(self, x):
        p, n = self.F.p, self.n
        x %= p
        if self.op == FINAL:
            expect(self.pos < n * n, "structure", "too many entries")
            i, j = divmod(self.pos, n)
            if j == 0:
                self.ck1 = self.walk_k1.next()
            expect(x != 0, "not-diameter", f"B^l has a zero at ({i + 1}, {j + 1})")
            self.chk_x = (self.chk_x + x * self.ck1 % p * self.walk_j2.next()) % p
            self.pos += 1
            return
        expect(self.pos < 2 * n * n, "structure", "too many entries")
        k, within = divmod(self.pos, 2 * n)
        k += 1
        if within == 0:
            self.ck1, self.ck2 = self.walk_k1.next(), self.walk_k2.next()
            self.xk = self.yk = 0
        if within < n:
            # column k of the left factor, row j = within + 1
            c = self.walk_j1.next()
            self.xk = (self.xk + x * c) % p
            self.chk_x = (self.chk_x + x * c % p * self.ck2) % p
            if self.step == self._steps() and x == 0 and not self.zeros:
                # the named cell must be the first zero in column-major order
                expect((within + 1, k) == self.cell, "not-diameter", "zero cell is not the first")
                self.zeros = 1
        else:
            # row k of the right factor
            c = self.walk_j2.next()
            self.yk = (self.yk + x * c) % p
            self.chk_y = (self.chk_y + x * c % p * self.ck1) % p
            if within == 2 * n - 1:
                self.nxt = (self.nxt + self.xk * self.yk) % p
        self.pos += 1

    def _end_step(self):
        if self.op is None:
            return
        n = self.n
        if self.op == FINAL:
            expect(self.pos == n * n, "structure", "final replay incomplete")
            expect(self.chk_x == self.cur, "schwartz-zippel", "final replay")
            return
        expect(self.pos == 2 * n * n, "structure", "step incomplete")
        expect(self.chk_x == self.cur, "schwartz-zippel", f"left factor of step {self.step}")
        right = self.cur if self.op == SQUARE else self.fb
        expect(self.chk_y == right, "schwartz-zippel", f"right factor of step {self.step}")
        self.cur = self.nxt

    def finish(self):
        expect(self.l is not None, "structure", "missing CLAIM")
        self._end_step()
        expect(self.op == FINAL and self.step == self._steps() + 1, "structure",
               "missing final replay")
        if self.l >= 2:
            expect(self.zeros == 1, "not-diameter", "named cell of B^(l-1) is nonzero")
        return Value(self.l)


# --- prover ---------------------------------------------------------------------

def _matmul(X, Y, p):
    Yt = list(zip(*Y))
    return [[sum(a * b for a, b in zip(row, col)) % p for col in Yt] for row in X]


def diameter_prove(header, stream, p=None) -> list[Token]:
    from .field import default_prime
    from .graphs import bfs_distances
    p = p or default_prime()
    n = header.n
    edges = [tuple(t.args[:2]) for t in stream]
    dist = [bfs_distances(n, edges, s) for s in range(1, n + 1)]
    if any(min(d[1:]) < 0 for d in dist):
        raise ValueError("graph is disconnected")
    l = max(max(d[1:]) for d in dist)
    # first zero of B^(l-1) in column-major order
    far = min(((v, u) for u in range(1, n + 1) for v in range(1, n + 1)
               if dist[u - 1][v] == l), default=None)
    B = [[int(i == j) for j in range(n)] for i in range(n)]
    for u, v in edges:
        B[u - 1][v - 1] += 1
        if u != v:
            B[v - 1][u - 1] += 1
    B = [[x % p for x in row] for row in B]
    ann = [T("CLAIM", l)]
    if l >= 1:
        ann.append(T("POW-ZERO-CELL", far[1], far[0]))
    P = B
    step = 0
    if l >= 2:
        for op in schedule(l):
            step += 1
            Y = P if op == SQUARE else B
            ann.append(T("POW-LEVEL", step, op))
            for k in range(n):
                ann += [T("POW-ENTRY", P[j][k]) for j in range(n)]
                ann += [T("POW-ENTRY", Y[k][j]) for j in range(n)]
            P = _matmul(P, Y, p)
    elif l == 0:
        P = [[int(i == j) for j in range(n)] for i in range(n)]
    ann.append(T("POW-LEVEL", step + 1, FINAL))
    ann += [T("POW-ENTRY", x) for row in P for x in row]
    return ann


def _gen(rng: random.Random, size: int):
    from .graphs import connected_graph, graph_stream
    n = max(1, min(size, 12))
    if rng.random() < 0.3:
        # paths and cycles give large diameters
        edges = [(i, i + 1) for i in range(1, n)]
        if rng.random() < 0.5 and n > 2:
            edges.append((n, 1))
        rng.shuffle(edges)
    else:
        edges = connected_graph(rng, n, rng.randint(n - 1, 3 * n))
    return graph_stream("graph", n, edges)


def _oracle(header, stream):
    from .oracles import diameter
    return Value(diameter(header.n, [tuple(t.args) for t in stream]))


register(Protocol(
    name="diameter",
    verifier=DiameterVerifier,
    prove=diameter_prove,
    gen=_gen,
    oracle=_oracle,
    schema={"CLAIM": "l", "POW-ZERO-CELL": "nn", "POW-LEVEL": "kk", "POW-ENTRY": "v"},
    canonical=True,
    node_bound=lambda h: h.n,
))
