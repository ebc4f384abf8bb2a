"""Decide whether a directed graph stream is acyclic.

If it is, the helper replays the edges labelled with topological ranks via
Consistent Labels and the verifier rejects any edge that does not go forward
in rank.  Otherwise the helper lists a closed directed walk ``C`` and then
``E \\ C``; the verifier checks closure locally and ``f(C + (E \\ C)) = f(E)``.

Annotation layout::

    CLAIM 1
    DAG-TOPO
    NODE-ROW v rank deg        (v = 1..n, ranks a permutation of 1..n)
    EDGE-ROW u v rank_u rank_v

    CLAIM 0
    DAG-CYCLE k
    CYC-EDGE u v               (k rows, consecutive edges share endpoints)
    EDGE u v                   (the rest of the multiset)
"""

from __future__ import annotations

import heapq
import random
from collections import Counter

from .core import Protocol, Value, Verifier, expect, register
from .field import range_fingerprint
from .graphs import graph_stream, random_dag, random_graph
from .labels import LabelChecker, degrees, edge_item
from .stream import T, Token


def topo_ranks(n: int, edges) -> dict[int, int] | None:
    """Kahn's algorithm, smallest node id first; None if a cycle exists."""
    indeg = [0] * (n + 1)
    out = [[] for _ in range(n + 1)]
    for u, v in edges:
        out[u].append(v)
        indeg[v] += 1
    heap = [v for v in range(1, n + 1) if indeg[v] == 0]
    heapq.heapify(heap)
    rank = {}
    while heap:
        u = heapq.heappop(heap)
        rank[u] = len(rank) + 1
        for v in out[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    return rank if len(rank) == n else None


def find_cycle(n: int, edges) -> list[tuple[int, int]]:
    """A directed cycle as a list of edges ``(v1,v2), ..., (vk,v1)``."""
    rank = {}
    indeg = [0] * (n + 1)
    out = [[] for _ in range(n + 1)]
    inn = [[] for _ in range(n + 1)]
    for u, v in edges:
        out[u].append(v)
        inn[v].append(u)
        indeg[v] += 1
    stack = [v for v in range(1, n + 1) if indeg[v] == 0]
    while stack:
        u = stack.pop()
        rank[u] = True
        for v in out[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    left = [v for v in range(1, n + 1) if v not in rank]
    if not left:
        raise ValueError("graph is acyclic")
    # every remaining node has a predecessor among the remaining nodes
    v = left[0]
    order, pos = [], {}
    while v not in pos:
        pos[v] = len(order)
        order.append(v)
        v = next(u for u in inn[v] if u not in rank)
    walk = order[pos[v]:]
    walk.reverse()  # we walked backwards along edges
    k = len(walk)
    return [(walk[i], walk[(i + 1) % k]) for i in range(k)]


def dag_prove(n: int, edges: list[tuple[int, int]]) -> tuple[bool, list[Token]]:
    rank = topo_ranks(n, edges)
    if rank is not None:
        deg = degrees(edges)
        ann = [T("CLAIM", 1), T("DAG-TOPO")]
        ann += [T("NODE-ROW", v, rank[v], deg[v]) for v in range(1, n + 1)]
        ann += [T("EDGE-ROW", u, v, rank[u], rank[v]) for u, v in edges]
        return True, ann
    cycle = find_cycle(n, edges)
    need = Counter(cycle)
    rest = []
    for e in edges:
        if need[e]:
            need[e] -= 1
        else:
            rest.append(e)
    ann = [T("CLAIM", 0), T("DAG-CYCLE", len(cycle))]
    ann += [T("CYC-EDGE", u, v) for u, v in cycle]
    ann += [T("EDGE", u, v) for u, v in rest]
    return False, ann


class DagVerifier(Verifier):
    protocol = "dag"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        n = header.n
        self.n = n
        self.stream_fp = ctx.fingerprint(max(n * n, 1))
        self.claim = None
        self.branch = None
        # topological branch
        self.labels = None
        self.rank_fp = None
        self.nodes = 0
        # cycle branch
        self.replay = None
        self.k = self.seen = 0
        self.first = self.prev = 0

    def on_stream(self, tok):
        u, v = tok.args
        self.stream_fp.update(edge_item(u, v, self.n, directed=True))

    def on_annotation(self, tok):
        tag, a = tok.tag, tok.args
        if self.claim is None:
            expect(tag == "CLAIM" and a[0] in (0, 1), "structure", "missing claim")
            self.claim = a[0]
            return
        if self.branch is None:
            if tag == "DAG-TOPO":
                expect(self.claim == 1, "structure", "claim does not match certificate")
                self.branch = "topo"
                self.labels = LabelChecker(self.ctx, self.n, self.n, directed=True)
                self.rank_fp = self.ctx.fingerprint(self.n)
            elif tag == "DAG-CYCLE":
                expect(self.claim == 0, "structure", "claim does not match certificate")
                expect(a[0] >= 1, "structure", "empty cycle")
                self.branch = "cycle"
                self.k = a[0]
                self.replay = self.ctx.fingerprint(max(self.n * self.n, 1))
            else:
                expect(False, "structure", f"unexpected {tag}")
            return
        if self.branch == "topo":
            if tag == "NODE-ROW":
                v, r, d = a
                expect(1 <= r <= self.n, "domain", "rank outside [1, n]")
                self.labels.node_row(v, r, d)
                self.rank_fp.update(r)
                self.nodes += 1
            elif tag == "EDGE-ROW":
                u, v, ru, rv = a
                self.labels.edge_row(u, v, ru, rv)
                expect(ru < rv, "order", f"edge ({u},{v}) goes backwards in rank")
            else:
                expect(False, "structure", f"unexpected {tag}")
            return
        if tag == "CYC-EDGE":
            u, v = a
            expect(self.seen < self.k, "structure", "too many cycle edges")
            if self.seen == 0:
                self.first = u
            else:
                expect(u == self.prev, "structure", "cycle is not a walk")
            self.prev = v
            self.seen += 1
            self.replay.update(edge_item(u, v, self.n, directed=True))
        elif tag == "EDGE":
            expect(self.seen == self.k, "structure", "cycle incomplete")
            self.replay.update(edge_item(*a, self.n, directed=True))
        else:
            expect(False, "structure", f"unexpected {tag}")

    def finish(self):
        expect(self.branch is not None, "structure", "no certificate")
        if self.branch == "topo":
            expect(self.nodes == self.n, "structure", "node rows must cover all nodes")
            perm = range_fingerprint(self.ctx.fingerprint(self.n), 1, self.n)
            expect(self.rank_fp == perm, "labels-inconsistent", "ranks are not a permutation")
            self.labels.finish(self.stream_fp)
            return Value(1)
        expect(self.seen == self.k, "structure", "cycle incomplete")
        expect(self.prev == self.first, "structure", "cycle is not closed")
        expect(self.replay == self.stream_fp, "edges-mismatch")
        return Value(0)


def _flip_claim(tokens, rng):
    out = list(tokens)
    for i, t in enumerate(out):
        if t.tag == "CLAIM":
            out[i] = T("CLAIM", 1 - t.args[0])
            return out
    return None


def _gen(rng: random.Random, size: int):
    n = max(size, 1)
    m = rng.randint(0, 2 * n)
    if rng.random() < 0.5:
        edges = random_dag(rng, n, m)
    else:
        edges = random_graph(rng, n, m, simple=False, loops=rng.random() < 0.2)
    return graph_stream("digraph", n, edges)


def _oracle(header, stream):
    from .oracles import is_acyclic
    return Value(int(is_acyclic(header.n, [t.args for t in stream])))


register(Protocol(
    name="dag",
    verifier=DagVerifier,
    prove=lambda h, s: dag_prove(h.n, [t.args for t in s])[1],
    gen=_gen,
    oracle=_oracle,
    schema={"CLAIM": "f", "DAG-CYCLE": "k", "NODE-ROW": "nlk", "EDGE-ROW": "nnll",
            "CYC-EDGE": "nn", "EDGE": "nn"},
    wrong_answer=_flip_claim,
))
