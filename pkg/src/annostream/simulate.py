"""Running a deterministic RAM program with its memory held by the helper.

A program is a generator over the header parameters.  It yields

    ("r", addr)        and receives the value read,
    ("w", addr, val)   to write,
    ("out", v)         to append ``v`` to the output,

and keeps only O(1) locals.  The verifier runs the program itself; the
helper supplies every memory access as a timestamped row, which the
verifier matches against the op the program asks for and feeds through the
memory checker.

Input graphs are loaded first: edge ``k`` occupies addresses ``3k-2, 3k-1,
3k`` as ``(u, v, w)``.  The helper sends the edges as load rows, the
verifier performs the writes itself and compares the loaded multiset with
the stream's.  Programs may require the load order to be sorted by weight.

Annotation::

    SIM-BOUNDS amax vbound tmax
    SIM-LOAD k u v w                    (k = 1..m)
    MEM-ROW t op addr old wts new       (one per program memory op)
    SIM-HALT t
    MEM-EPILOGUE addr value wts
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .core import Protocol, Value, Verifier, expect, register
from .memcheck import MEM_SCHEMA, READ, WRITE, MemChecker, MemoryTrace
from .stream import StreamHeader, T, Token

INF = 1 << 40
DEFAULT_WMAX = 1 << 20


@dataclass(frozen=True)
class SimProgram:
    name: str
    body: Callable            # generator function of (n, m, directed, s)
    sorted_load: bool = False
    scalar: bool = False


def _args(header) -> dict:
    return {"n": header.get("n", 0), "m": header.m, "s": header.get("s", 1),
            "directed": header.kind in ("digraph", "wdigraph")}


# --- verifier -------------------------------------------------------------------

class SimVerifier(Verifier):
    program: SimProgram

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        n = max(header.get("n", 1), 1)
        self.wmax = header.get("wmax", DEFAULT_WMAX)
        self.sfp = ctx.tuple_fingerprint((n, n, self.wmax))
        self.lfp = ctx.tuple_fingerprint((n, n, self.wmax))
        self.mem = None
        self.loaded = 0
        self.last_w = 0
        self.run = None
        self.pending = None
        self.halted = False

    def on_stream(self, tok):
        u, v, w = tok.args
        expect(0 <= w <= self.wmax, "domain", f"weight {w}")
        self.sfp.update((u, v, w))

    def _advance(self, value):
        """Run the program up to its next memory op; outputs go to the sink."""
        while True:
            try:
                op = self.run.send(value)
            except StopIteration:
                return None
            if op[0] != "out":
                return op
            self.emit(op[1])
            value = None

    def _start(self):
        if self.run is None:
            expect(self.mem is not None and self.loaded == self.header.m, "structure",
                   "load phase incomplete")
            self.run = self.program.body(**_args(self.header))
            self.pending = self._advance(None)

    def on_annotation(self, tok):
        tag, a = tok.tag, tok.args
        if tag == "SIM-BOUNDS":
            expect(self.mem is None, "structure", "repeated SIM-BOUNDS")
            amax, vbound, tmax = a
            expect(min(amax, vbound, tmax) >= 1, "domain", "bounds must be positive")
            expect(amax >= 3 * self.header.m and vbound >= self.wmax, "domain", "bounds too small")
            self.mem = MemChecker(self.ctx, amax, vbound, tmax)
        elif tag == "SIM-LOAD":
            k, u, v, w = a
            expect(self.mem is not None and self.run is None, "structure", "SIM-LOAD misplaced")
            expect(k == self.loaded + 1 and k <= self.header.m, "structure", "load rows out of order")
            if self.program.sorted_load:
                expect(w >= self.last_w, "order", "edges must be loaded by weight")
            self.last_w = w
            self.loaded = k
            self.lfp.update((u, v, w))
            for addr, val in ((3 * k - 2, u), (3 * k - 1, v), (3 * k, w)):
                self.mem.row(self.mem.clock + 1, WRITE, addr, 0, 0, val)
        elif tag == "MEM-ROW":
            self._start()
            t, op, addr, old, wts, new = a
            want = self.pending
            expect(want is not None and not self.halted, "divergence", "program has halted")
            if want[0] == "r":
                expect(op == READ and addr == want[1], "divergence", f"expected read of {want[1]}")
            else:
                expect(op == WRITE and addr == want[1] and new == want[2], "divergence",
                       f"expected write {want[2]} to {want[1]}")
            self.mem.row(t, op, addr, old, wts, new)
            self.pending = self._advance(old if op == READ else None)
        elif tag == "SIM-HALT":
            self._start()
            expect(self.pending is None, "structure", "transcript ends before the program halts")
            expect(not self.halted and a[0] == self.mem.clock, "structure", "bad SIM-HALT")
            self.halted = True
        elif tag == "MEM-EPILOGUE":
            expect(self.halted, "structure", "epilogue before SIM-HALT")
            self.mem.epilogue(*a)
        else:
            expect(False, "structure", f"unexpected {tag}")

    def finish(self):
        expect(self.halted, "structure", "missing SIM-HALT")
        expect(self.sfp == self.lfp, "tamper", "loaded edges differ from the stream")
        self.mem.finish()
        out = self.emitted()
        return Value(out[0] if self.program.scalar else out)


def simulate_verify(program: SimProgram, header, stream, annotation, seed: int = 0, **kw):
    from .core import run_protocol
    cls = type(f"{program.name}Verifier", (SimVerifier,), {"program": program,
                                                           "protocol": program.name})
    return run_protocol(cls, header, stream, annotation, seed, **kw)


# --- honest helper --------------------------------------------------------------

def simulate_prove(program: SimProgram, header, stream) -> list[Token]:
    edges = [tuple(t.args) for t in stream]
    if program.sorted_load:
        edges.sort(key=lambda e: e[2])
    trace = MemoryTrace()
    for k, (u, v, w) in enumerate(edges, 1):
        for addr, val in ((3 * k - 2, u), (3 * k - 1, v), (3 * k, w)):
            trace.access(WRITE, addr, val)
    nload = trace.clock
    run = program.body(**_args(header))
    value = None
    while True:
        try:
            op = run.send(value)
        except StopIteration:
            break
        value = None
        if op[0] == "r":
            value = trace.access(READ, op[1])
        elif op[0] == "w":
            trace.access(WRITE, op[1], op[2])
    amax, vbound, tmax = trace.bounds()
    wmax = header.get("wmax", DEFAULT_WMAX)
    ann = [T("SIM-BOUNDS", max(amax, 3 * len(edges), 1), max(vbound, wmax), tmax)]
    ann += [T("SIM-LOAD", k, *e) for k, e in enumerate(edges, 1)]
    ann += [T("MEM-ROW", *r) for r in trace.rows[nload:]]
    ann.append(T("SIM-HALT", trace.clock))
    ann += [T("MEM-EPILOGUE", *e) for e in trace.epilogue()]
    return ann


SIM_SCHEMA = {"SIM-BOUNDS": "kkk", "SIM-LOAD": "knnv", "SIM-HALT": "k", **MEM_SCHEMA}


# --- programs -------------------------------------------------------------------

def edge_count(n, m, s, directed):
    """Reads every loaded edge and outputs how many there were."""
    c = 0
    for k in range(1, m + 1):
        yield ("r", 3 * k - 2)
        c += 1
    yield ("out", c)


def _find(par, x):
    # path halving
    while True:
        p = yield ("r", par + x)
        if p == x:
            return x
        g = yield ("r", par + p)
        if g == p:
            return p
        yield ("w", par + x, g)
        x = g


def kruskal(n, m, s, directed):
    """Kruskal over edges already loaded in weight order; union by rank."""
    par = 3 * m
    rank = par + n
    for v in range(1, n + 1):
        yield ("w", par + v, v)
    total = 0
    for k in range(1, m + 1):
        u = yield ("r", 3 * k - 2)
        v = yield ("r", 3 * k - 1)
        w = yield ("r", 3 * k)
        ru = yield from _find(par, u)
        rv = yield from _find(par, v)
        if ru == rv:
            continue
        a = yield ("r", rank + ru)
        b = yield ("r", rank + rv)
        if a < b:
            ru, rv, a, b = rv, ru, b, a
        yield ("w", par + rv, ru)
        if a == b:
            yield ("w", rank + ru, a + 1)
        total += w
    yield ("out", total)


def _sift_up(Q, P, D, i):
    v = yield ("r", Q + i)
    dv = yield ("r", D + v)
    while i > 1:
        j = i // 2
        pv = yield ("r", Q + j)
        dp = yield ("r", D + pv)
        if dp <= dv:
            break
        yield ("w", Q + i, pv)
        yield ("w", P + pv, i)
        i = j
    yield ("w", Q + i, v)
    yield ("w", P + v, i)


def _sift_down(Q, P, D, i, size):
    v = yield ("r", Q + i)
    dv = yield ("r", D + v)
    while 2 * i <= size:
        c = 2 * i
        cv = yield ("r", Q + c)
        dc = yield ("r", D + cv)
        if c + 1 <= size:
            c2 = yield ("r", Q + c + 1)
            d2 = yield ("r", D + c2)
            if d2 < dc:
                c, cv, dc = c + 1, c2, d2
        if dc >= dv:
            break
        yield ("w", Q + i, cv)
        yield ("w", P + cv, i)
        i = c
    yield ("w", Q + i, v)
    yield ("w", P + v, i)


def dijkstra(n, m, s, directed):
    """Dijkstra with an indexed binary heap over adjacency lists it builds.

    Layout after the edges: head[v], records (to, w, next), dist[v],
    heap[i], pos[v] (0 = not in the heap).
    """
    H = 3 * m
    R = H + n
    D = R + 6 * m
    Q = D + n
    P = Q + n
    r = 0
    for k in range(1, m + 1):
        u = yield ("r", 3 * k - 2)
        v = yield ("r", 3 * k - 1)
        w = yield ("r", 3 * k)
        for a, b in ((u, v), (v, u))[: 1 if directed else 2]:
            r += 1
            h = yield ("r", H + a)
            yield ("w", R + 3 * r - 2, b)
            yield ("w", R + 3 * r - 1, w)
            yield ("w", R + 3 * r, h)
            yield ("w", H + a, r)
    for v in range(1, n + 1):
        yield ("w", D + v, INF)
    yield ("w", D + s, 0)
    yield ("w", Q + 1, s)
    yield ("w", P + s, 1)
    size = 1
    while size:
        u = yield ("r", Q + 1)
        du = yield ("r", D + u)
        last = yield ("r", Q + size)
        size -= 1
        yield ("w", P + u, 0)
        if size:
            yield ("w", Q + 1, last)
            yield ("w", P + last, 1)
            yield from _sift_down(Q, P, D, 1, size)
        e = yield ("r", H + u)
        while e:
            to = yield ("r", R + 3 * e - 2)
            w = yield ("r", R + 3 * e - 1)
            nxt = yield ("r", R + 3 * e)
            dv = yield ("r", D + to)
            if du + w < dv:
                yield ("w", D + to, du + w)
                pt = yield ("r", P + to)
                if pt == 0:
                    size += 1
                    yield ("w", Q + size, to)
                    yield ("w", P + to, size)
                    pt = size
                yield from _sift_up(Q, P, D, pt)
            e = nxt
    for v in range(1, n + 1):
        d = yield ("r", D + v)
        yield ("out", d)


def floyd_warshall(n, m, s, directed):
    """Triple-loop Floyd-Warshall on an n x n distance table."""
    D = 3 * m - n  # cell (i, j) at D + i * n + j
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            yield ("w", D + i * n + j, 0 if i == j else INF)
    for k in range(1, m + 1):
        u = yield ("r", 3 * k - 2)
        v = yield ("r", 3 * k - 1)
        w = yield ("r", 3 * k)
        for a, b in ((u, v), (v, u))[: 1 if directed else 2]:
            cur = yield ("r", D + a * n + b)
            if w < cur:
                yield ("w", D + a * n + b, w)
    for k in range(1, n + 1):
        for i in range(1, n + 1):
            dik = yield ("r", D + i * n + k)
            if dik >= INF:
                continue
            for j in range(1, n + 1):
                dkj = yield ("r", D + k * n + j)
                if dkj >= INF:
                    continue
                dij = yield ("r", D + i * n + j)
                if dik + dkj < dij:
                    yield ("w", D + i * n + j, dik + dkj)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            d = yield ("r", D + i * n + j)
            yield ("out", d)


EDGE_COUNT = SimProgram("edgecount", edge_count, scalar=True)
MST = SimProgram("mst", kruskal, sorted_load=True, scalar=True)
SSSP = SimProgram("sssp", dijkstra)
APSP = SimProgram("apsp", floyd_warshall)


# --- protocols ------------------------------------------------------------------

def _weighted(rng: random.Random, n: int, m: int, kind: str, connected: bool):
    from .graphs import connected_graph, graph_stream, random_graph
    wmax = rng.choice((5, 100, 1000))
    pairs = (connected_graph(rng, n, m, simple=False) if connected
             else random_graph(rng, n, m, simple=False, loops=True))
    edges = [(u, v, rng.randint(0, wmax)) for u, v in pairs]
    return graph_stream(kind, n, edges, wmax=wmax)


def _gen_mst(rng, size):
    n = max(1, min(size, 24))
    return _weighted(rng, n, rng.randint(n - 1, 3 * n), "wgraph", True)


def _gen_sssp(rng, size):
    n = max(1, min(size, 24))
    kind = rng.choice(("wgraph", "wdigraph"))
    h, s = _weighted(rng, n, rng.randint(0, 3 * n), kind, rng.random() < 0.5)
    h.params["s"] = rng.randint(1, n)
    return h, s


def _gen_apsp(rng, size):
    n = max(1, min(size, 8))
    return _weighted(rng, n, rng.randint(0, 3 * n), "wdigraph", False)


def _oracle_mst(header, stream):
    from .oracles import mst_weight
    return Value(mst_weight(header.n, [tuple(t.args) for t in stream]))


def _oracle_sssp(header, stream):
    from .oracles import dijkstra as ref
    d = ref(header.n, [tuple(t.args) for t in stream], header.s,
            directed=header.kind == "wdigraph")
    return Value(tuple(d.get(v, INF) for v in range(1, header.n + 1)))


def _oracle_apsp(header, stream):
    from .oracles import floyd_warshall as ref
    n = header.n
    d = ref(n, [tuple(t.args) for t in stream], directed=True)
    return Value(tuple(d.get((i, j), INF) for i in range(1, n + 1) for j in range(1, n + 1)))


def _forge_read(tokens, rng):
    """Change the value one read row returns, as if memory lied."""
    idx = [i for i, t in enumerate(tokens) if t.tag == "MEM-ROW" and t.args[1] == READ]
    if not idx:
        return None
    i = rng.choice(idx)
    t, op, addr, old, wts, new = tokens[i].args
    out = list(tokens)
    out[i] = T("MEM-ROW", t, op, addr, old + 1, wts, new + 1)
    return out


def _register(program: SimProgram, gen, oracle):
    cls = type(f"{program.name.upper()}Verifier", (SimVerifier,),
               {"program": program, "protocol": program.name})
    register(Protocol(
        name=program.name,
        verifier=cls,
        prove=lambda h, s: simulate_prove(program, h, s),
        gen=gen,
        oracle=oracle,
        schema=SIM_SCHEMA,
        wrong_answer=_forge_read,
        node_bound=lambda h: max(h.get("n", 1), 1),
    ))
    return cls


MSTVerifier = _register(MST, _gen_mst, _oracle_mst)
SSSPVerifier = _register(SSSP, _gen_sssp, _oracle_sssp)
APSPVerifier = _register(APSP, _gen_apsp, _oracle_apsp)
