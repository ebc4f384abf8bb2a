"""Graph problems with totally unimodular LP formulations.

Each stream edge contributes a fixed, local set of LP entries, so the LP
verifier can fingerprint the instance while reading the graph.  Entries
that depend only on the header (``s``, ``t``, node capacities) are folded in
up front.  Problems and their LPs (all ``min c.x`` s.t. ``Ax <= b``):

``spath``    x = flow on edges; send one unit from s to t at least cost.
             Rows v / n+v: conservation as two inequalities; rows 2n+e: x_e >= 0.
``maxflow``  x = flow; minimise minus the net outflow of s.
             Rows v / n+v: conservation away from s, t; 2n+e: capacity;
             2n+m+e: x_e >= 0.  Answer is -opt.
``mincut``   x = (d_e, p_v); rows e: p_a - p_b - d_e <= 0; m+e: d_e >= 0;
             2m+1: p_t - p_s <= -1.
``mwbpm``    x = edge indicators of a perfect matching between 1..nl and
             nl+1..n (n = 2 nl); rows v / n+v: degree = 1 as two
             inequalities; 2n+e: x_e >= 0.  Minimum total weight.

The honest helper builds its certificates combinatorially (Dijkstra
potentials, a maximum flow and its cut, Hungarian potentials) rather than
by simplex, which keeps proving fast at large m.
"""

from __future__ import annotations

import heapq
import random
from collections import deque
from fractions import Fraction

from .core import Protocol, Value, expect, register
from .graphs import graph_stream
from .lp import LP_SCHEMA, LPCore, LPInstance, lp_annotation
from .stream import StreamHeader

PROBLEMS = ("spath", "maxflow", "mincut", "mwbpm")


def dims(problem: str, n: int, m: int) -> tuple[int, int]:
    return {
        "spath": (2 * n + m, m),
        "maxflow": (2 * n + 2 * m, m),
        "mincut": (2 * m + 1, m + n),
        "mwbpm": (2 * n + m, m),
    }[problem]


def edge_entries(problem: str, header: StreamHeader, e: int, edge) -> list[tuple]:
    """LP entries contributed by stream edge number ``e`` (1-based)."""
    n, m = header.n, header.m
    a, b, w = edge
    if problem == "spath":
        return [("A", a, e, 1), ("A", b, e, -1), ("A", n + a, e, -1), ("A", n + b, e, 1),
                ("A", 2 * n + e, e, -1), ("c", e, w)]
    if problem == "maxflow":
        s, t = header.s, header.t
        out = [("A", 2 * n + e, e, 1), ("b", 2 * n + e, w), ("A", 2 * n + m + e, e, -1)]
        if a not in (s, t):
            out += [("A", a, e, 1), ("A", n + a, e, -1)]
        if b not in (s, t):
            out += [("A", b, e, -1), ("A", n + b, e, 1)]
        out += [("c", e, -int(a == s) + int(b == s))]
        return out
    if problem == "mincut":
        return [("A", e, m + a, 1), ("A", e, m + b, -1), ("A", e, e, -1),
                ("A", m + e, e, -1), ("c", e, w)]
    return [("A", a, e, 1), ("A", b, e, 1), ("A", n + a, e, -1), ("A", n + b, e, -1),
            ("A", 2 * n + e, e, -1), ("c", e, w)]


def constant_entries(problem: str, header: StreamHeader) -> list[tuple]:
    n, m = header.n, header.m
    if problem == "spath":
        s, t = header.s, header.t
        return [("b", s, 1), ("b", t, -1), ("b", n + s, -1), ("b", n + t, 1)]
    if problem == "mincut":
        s, t = header.s, header.t
        return [("A", 2 * m + 1, m + s, -1), ("A", 2 * m + 1, m + t, 1), ("b", 2 * m + 1, -1)]
    if problem == "mwbpm":
        return [("b", v, 1) for v in range(1, n + 1)] + [("b", n + v, -1) for v in range(1, n + 1)]
    return []


def reduce(problem: str, header: StreamHeader, stream) -> LPInstance:
    """The LP instance a TUM stream describes (duplicates summed)."""
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}")
    if problem != "mwbpm" and ("s" not in header.params or "t" not in header.params):
        raise ValueError("s and t are required")
    nb, nc = dims(problem, header.n, header.m)
    entries = list(constant_entries(problem, header))
    for e, tok in enumerate(stream, start=1):
        entries += edge_entries(problem, header, e, tok.args)
    return LPInstance.from_entries(nb, nc, entries)


def extract(problem: str, opt):
    return -opt if problem == "maxflow" else opt


# --- combinatorial certificates ------------------------------------------------

def dijkstra(n: int, edges, s: int) -> tuple[list, list]:
    """Distances (None if unreachable) and the incoming tree edge index."""
    adj = [[] for _ in range(n + 1)]
    for e, (a, b, w) in enumerate(edges, start=1):
        adj[a].append((b, w, e))
    dist = [None] * (n + 1)
    pred = [0] * (n + 1)
    dist[s] = 0
    pq = [(0, s)]
    while pq:
        d, u = heapq.heappop(pq)
        if d > dist[u]:
            continue
        for v, w, e in adj[u]:
            if dist[v] is None or d + w < dist[v]:
                dist[v], pred[v] = d + w, e
                heapq.heappush(pq, (d + w, v))
    return dist, pred


def spath_certificate(header, edges) -> tuple[dict, dict]:
    n, m, s, t = header.n, header.m, header.s, header.t
    dist, pred = dijkstra(n, edges, s)
    if dist[t] is None:
        raise ValueError("t is unreachable from s")
    x = {}
    v = t
    while v != s:
        e = pred[v]
        x[e] = 1
        v = edges[e - 1][0]
    D = dist[t]
    phi = [0] + [D if d is None else min(d, D) for d in dist[1:]]
    y = {v: -phi[v] for v in range(1, n + 1)}
    for e, (a, b, w) in enumerate(edges, start=1):
        y[2 * n + e] = -phi[a] + phi[b] - w
    return x, y


def max_flow(n: int, edges, s: int, t: int) -> tuple[list, set]:
    """Edmonds-Karp on the edge list; returns per-edge flow and the source
    side of a minimum cut."""
    m = len(edges)
    adj = [[] for _ in range(n + 1)]
    cap = []
    to = []
    for a, b, w in edges:
        adj[a].append(len(to))
        to.append(b)
        cap.append(w)
        adj[b].append(len(to))
        to.append(a)
        cap.append(0)
    while True:
        par = [-1] * (n + 1)
        par[s] = -2
        dq = deque([s])
        while dq and par[t] == -1:
            u = dq.popleft()
            for k in adj[u]:
                if cap[k] > 0 and par[to[k]] == -1:
                    par[to[k]] = k
                    dq.append(to[k])
        if par[t] == -1 or s == t:
            break
        push = None
        v = t
        while v != s:
            k = par[v]
            push = cap[k] if push is None else min(push, cap[k])
            v = to[k ^ 1]
        v = t
        while v != s:
            k = par[v]
            cap[k] -= push
            cap[k ^ 1] += push
            v = to[k ^ 1]
    side = {v for v in range(1, n + 1) if par[v] != -1}
    flow = [cap[2 * e + 1] for e in range(m)]
    for e, (a, b, _) in enumerate(edges):
        if a == b:
            flow[e] = 0
    return flow, side


def maxflow_certificate(header, edges) -> tuple[dict, dict]:
    n, m, s, t = header.n, header.m, header.s, header.t
    flow, side = max_flow(n, edges, s, t)
    x = {e + 1: f for e, f in enumerate(flow)}
    y = {}
    for v in range(1, n + 1):
        if v not in (s, t) and v in side:
            y[n + v] = -1
    for e, (a, b, _) in enumerate(edges, start=1):
        ga, gb = int(a in side), int(b in side)
        if ga - gb == 1:
            y[2 * n + e] = -1
        elif ga - gb == -1:
            y[2 * n + m + e] = -1
    return x, y


def mincut_certificate(header, edges) -> tuple[dict, dict]:
    n, m, s, t = header.n, header.m, header.s, header.t
    flow, side = max_flow(n, edges, s, t)
    x = {}
    for e, (a, b, _) in enumerate(edges, start=1):
        x[e] = int(a in side and b not in side)
    for v in range(1, n + 1):
        x[m + v] = int(v in side)
    y = {}
    for e, (a, b, w) in enumerate(edges, start=1):
        y[e] = -flow[e - 1]
        y[m + e] = -w + flow[e - 1]
    y[2 * m + 1] = -sum(flow[e - 1] for e, (a, b, _) in enumerate(edges, start=1)
                        if a == s and b != s) + sum(
        flow[e - 1] for e, (a, b, _) in enumerate(edges, start=1) if b == s and a != s)
    return x, y


def hungarian(cost: list[list[int]]) -> tuple[list, list, list]:
    """Min-cost assignment on a square matrix with potentials ``u, v`` such
    that ``u[i] + v[j] <= cost[i][j]`` with equality on the assignment."""
    k = len(cost)
    INF = float("inf")
    u = [0] * (k + 1)
    v = [0] * (k + 1)
    p = [0] * (k + 1)
    way = [0] * (k + 1)
    for i in range(1, k + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (k + 1)
        used = [False] * (k + 1)
        while True:
            used[j0] = True
            i0, delta, j1 = p[j0], INF, 0
            for j in range(1, k + 1):
                if not used[j]:
                    cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j], way[j] = cur, j0
                    if minv[j] < delta:
                        delta, j1 = minv[j], j
            for j in range(k + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assign = [0] * (k + 1)
    for j in range(1, k + 1):
        assign[p[j]] = j
    return assign[1:], u[1:], v[1:]


def mwbpm_certificate(header, edges) -> tuple[dict, dict]:
    """Hungarian assignment and potentials ``pi`` with ``pi_a + pi_b <= w_e``.

    The dual splits each ``pi_v`` over the two degree rows so both stay
    nonpositive; edge rows carry the reduced costs.
    """
    n, nl = header.n, header.nl
    best = {}
    for e, (a, b, w) in enumerate(edges, start=1):
        if a > nl:
            a, b = b, a
        if (a, b) not in best or edges[best[a, b] - 1][2] > w:
            best[a, b] = e
    big = 1 + sum(w for _, _, w in edges)
    cost = [[big] * nl for _ in range(nl)]
    for (a, b), e in best.items():
        cost[a - 1][b - nl - 1] = edges[e - 1][2]
    assign, u, v = hungarian(cost)
    if any((i, nl + j) not in best for i, j in enumerate(assign, start=1)):
        raise ValueError("no perfect matching")
    x = {best[i, nl + j]: 1 for i, j in enumerate(assign, start=1)}
    pi = {a: u[a - 1] for a in range(1, nl + 1)}
    pi.update({nl + b: v[b - 1] for b in range(1, nl + 1)})
    y = {}
    for w_ in range(1, n + 1):
        y[w_], y[n + w_] = min(pi[w_], 0), -max(pi[w_], 0)
    for e, (a, b, w) in enumerate(edges, start=1):
        y[2 * n + e] = pi[a] + pi[b] - w
    return x, y


CERTIFICATES = {"spath": spath_certificate, "maxflow": maxflow_certificate,
                "mincut": mincut_certificate, "mwbpm": mwbpm_certificate}


def tum_prove(problem: str, header, stream) -> list:
    edges = [tuple(t.args) for t in stream]
    x, y = CERTIFICATES[problem](header, edges)
    return lp_annotation(reduce(problem, header, stream), x, y)


# --- verifiers ------------------------------------------------------------------

class TumVerifier(LPCore):
    problem = ""

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        self.setup(*dims(self.problem, header.n, header.m))
        self.e = 0
        for entry in constant_entries(self.problem, header):
            self.add(*entry)

    def on_stream(self, tok):
        self.e += 1
        if self.problem == "mwbpm":
            a, b = tok.args[:2]
            nl = self.header.nl
            expect(2 * nl == self.header.n, "domain", "sides must have equal size")
            expect((a <= nl) != (b <= nl), "domain", "edge inside one side")
        for entry in edge_entries(self.problem, self.header, self.e, tok.args):
            self.add(*entry)

    def extract(self, opt):
        return extract(self.problem, opt)


def _verifier(problem: str):
    return type(f"{problem.title()}Verifier", (TumVerifier,),
                {"problem": problem, "protocol": problem})


def _gen_st(rng: random.Random, size: int, reach: bool):
    n = max(size, 2)
    m = rng.randint(n, 3 * n)
    wmax = 20
    edges = [(rng.randint(1, n), rng.randint(1, n), rng.randint(0 if reach else 1, wmax))
             for _ in range(m)]
    s, t = rng.sample(range(1, n + 1), 2)
    if reach:
        # a random s-t path keeps t reachable
        mids = rng.sample([v for v in range(1, n + 1) if v not in (s, t)], min(n - 2, rng.randint(0, 3)))
        path = [s, *mids, t]
        edges += [(a, b, rng.randint(0, wmax)) for a, b in zip(path, path[1:])]
        rng.shuffle(edges)
    return graph_stream("wdigraph", n, edges, s=s, t=t, wmax=wmax)


def perfect_bipartite(rng: random.Random, nl: int, m: int, wmax: int = 20) -> list[tuple]:
    """Bipartite multigraph on 1..nl / nl+1..2nl containing a perfect matching."""
    right = rng.sample(range(nl + 1, 2 * nl + 1), nl)
    edges = [(a, b, rng.randint(0, wmax)) for a, b in zip(range(1, nl + 1), right)]
    edges += [(rng.randint(1, nl), rng.randint(nl + 1, 2 * nl), rng.randint(0, wmax))
              for _ in range(max(m - nl, 0))]
    edges = [(b, a, w) if rng.random() < 0.5 else (a, b, w) for a, b, w in edges]
    rng.shuffle(edges)
    return edges


def _gen_mwbpm(rng: random.Random, size: int):
    nl = max(size // 2, 1)
    return graph_stream("wgraph", 2 * nl, perfect_bipartite(rng, nl, rng.randint(nl, 4 * nl)),
                        nl=nl, wmax=20)


def _oracle(problem):
    def run(header, stream):
        from . import oracles
        edges = [tuple(t.args) for t in stream]
        n = header.n
        if problem == "spath":
            return Value(oracles.dijkstra(n, edges, header.s, directed=True)[header.t])
        if problem == "maxflow":
            return Value(oracles.max_flow(n, edges, header.s, header.t))
        if problem == "mincut":
            return Value(oracles.min_cut(n, edges, header.s, header.t) if n <= 14
                         else oracles.max_flow(n, edges, header.s, header.t))
        return Value(oracles.mwbpm(header.nl, n, edges))
    return run


_GENS = {
    "spath": lambda rng, size: _gen_st(rng, size, True),
    "maxflow": lambda rng, size: _gen_st(rng, size, False),
    "mincut": lambda rng, size: _gen_st(rng, size, False),
    "mwbpm": _gen_mwbpm,
}

for _p in PROBLEMS:
    register(Protocol(
        name=_p,
        verifier=_verifier(_p),
        prove=(lambda p: lambda h, s: tum_prove(p, h, s))(_p),
        gen=_GENS[_p],
        oracle=_oracle(_p),
        schema=LP_SCHEMA,
        node_bound=(lambda p: lambda h: max(dims(p, h.n, h.m)))(_p),
    ))
