"""Maximum matching size with a Tutte-Berge certificate.

The helper shows a matching ``M`` of size ``k`` (lower bound) and a set
``V_S`` such that ``G - V_S`` has ``c`` odd components and
``k = (|V_S| - c + n) / 2`` (upper bound).  Components are proved connected
with BFS transcripts that share one set of fingerprints.

Annotation layout::

    CLAIM k
    MATCH-M u v                 (k rows)
    MATCH-VM v                  (2k rows, strictly increasing)
    MATCH-REST u v              (E \\ M)
    MATCH-VS v                  (strictly increasing)
    MATCH-COMP nv               then a BFS transcript of (V_i, E_i) rooted at min V_i
    MATCH-ES-NODE v l deg       (v = 1..n, l = 1 iff v in V_S, deg within E_S)
    MATCH-ES u v lu lv          (E_S: every edge with an endpoint in V_S)
"""

from __future__ import annotations

import random
from collections import Counter

from .core import Protocol, Value, Verifier, expect, register
from .field import range_fingerprint
from .graphs import graph_stream, random_graph
from .labels import LabelChecker, edge_item
from .stream import T, Token
from .traversal import BFS_SCHEMA, BfsChecker, bfs_labels, bfs_transcript


# --- prover ---------------------------------------------------------------------

class Blossom:
    """Edmonds' algorithm with blossom contraction (0-based nodes)."""

    def __init__(self, n: int, edges):
        self.n = n
        self.adj = [[] for _ in range(n)]
        for u, v in edges:
            if u != v:
                self.adj[u].append(v)
                self.adj[v].append(u)
        self.match = [-1] * n

    def _lca(self, a, b):
        seen = set()
        while True:
            a = self.base[a]
            seen.add(a)
            if self.match[a] == -1:
                break
            a = self.p[self.match[a]]
        while True:
            b = self.base[b]
            if b in seen:
                return b
            if self.match[b] == -1:
                raise RuntimeError("even vertices in different trees")
            b = self.p[self.match[b]]

    def _mark(self, v, b, child, mark):
        while self.base[v] != b:
            mark.add(self.base[v])
            mark.add(self.base[self.match[v]])
            self.p[v] = child
            child = self.match[v]
            v = self.p[self.match[v]]

    def _search(self, roots):
        """Grow an alternating forest from ``roots``; return an exposed
        vertex reached by an augmenting path, or -1."""
        n = self.n
        self.used = used = [False] * n
        self.p = p = [-1] * n
        self.base = base = list(range(n))
        match = self.match
        q = list(roots)
        for r in roots:
            used[r] = True
        head = 0
        while head < len(q):
            v = q[head]
            head += 1
            for to in self.adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if used[to]:
                    cur = self._lca(v, to)
                    mark: set = set()
                    self._mark(v, cur, to, mark)
                    self._mark(to, cur, v, mark)
                    for i in range(n):
                        if base[i] in mark:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                q.append(i)
                elif p[to] == -1:
                    p[to] = v
                    if match[to] == -1:
                        return to
                    used[match[to]] = True
                    q.append(match[to])
        return -1

    def solve(self) -> list[int]:
        match = self.match
        for u in range(self.n):
            if match[u] == -1:
                for v in self.adj[u]:
                    if match[v] == -1:
                        match[u], match[v] = v, u
                        break
        for r in range(self.n):
            if match[r] != -1:
                continue
            v = self._search([r])
            while v != -1:
                pv = self.p[v]
                ppv = match[pv]
                match[v], match[pv] = pv, v
                v = ppv
        return match

    def gallai_edmonds(self) -> tuple[set, set]:
        """(D, A) for the current maximum matching: D holds nodes missed by
        some maximum matching, A their neighbours outside D."""
        exposed = [v for v in range(self.n) if self.match[v] == -1]
        if self._search(exposed) != -1:
            raise RuntimeError("matching is not maximum")
        even = {v for v in range(self.n) if self.used[v]}
        odd = {v for v in range(self.n) if self.p[v] != -1 and not self.used[v]}
        return even, odd


def max_matching(n: int, edges) -> tuple[list[tuple[int, int]], set[int]]:
    """A maximum matching (1-based pairs) and the Gallai-Edmonds set A."""
    b = Blossom(n, [(u - 1, v - 1) for u, v, *_ in edges])
    match = b.solve()
    _, odd = b.gallai_edmonds()
    pairs = [(u + 1, match[u] + 1) for u in range(n) if match[u] > u]
    return pairs, {v + 1 for v in odd}


def matching_prove(n: int, edges) -> tuple[int, list[Token]]:
    pairs, vs = max_matching(n, edges)
    k = len(pairs)
    ann = [T("CLAIM", k)]
    ann += [T("MATCH-M", u, v) for u, v in pairs]
    ann += [T("MATCH-VM", v) for v in sorted(x for e in pairs for x in e)]
    need = Counter((min(u, v), max(u, v)) for u, v in pairs)
    for u, v, *_ in edges:
        key = (min(u, v), max(u, v))
        if need[key]:
            need[key] -= 1
        else:
            ann.append(T("MATCH-REST", u, v))
    ann += [T("MATCH-VS", v) for v in sorted(vs)]
    rest = [v for v in range(1, n + 1) if v not in vs]
    inner = [(u, v) for u, v, *_ in edges if u not in vs and v not in vs]
    es = [(u, v) for u, v, *_ in edges if u in vs or v in vs]
    root, dist = bfs_labels(n, inner, nodes=rest)
    comps: dict[int, list] = {}
    for v in rest:
        comps.setdefault(root[v], []).append(v)
    comp_edges: dict[int, list] = {r: [] for r in comps}
    for u, v in inner:
        comp_edges[root[u]].append((u, v))
    for r in sorted(comps):
        ann.append(T("MATCH-COMP", len(comps[r])))
        ann += bfs_transcript(comp_edges[r], {v: r for v in comps[r]},
                              {v: dist[v] for v in comps[r]})
    deg = Counter()
    for u, v in es:
        deg[u] += 1
        deg[v] += 1
    ann += [T("MATCH-ES-NODE", v, int(v in vs), deg[v]) for v in range(1, n + 1)]
    ann += [T("MATCH-ES", u, v, int(u in vs), int(v in vs)) for u, v in es]
    return k, ann


# --- verifier -------------------------------------------------------------------

_PHASES = {"CLAIM": 0, "MATCH-M": 1, "MATCH-VM": 2, "MATCH-REST": 3, "MATCH-VS": 4,
           "MATCH-COMP": 5, "BFS-NODE": 5, "BFS-LEVEL": 5, "BFS-EDGE": 5,
           "MATCH-ES-NODE": 6, "MATCH-ES": 7}


class MatchingVerifier(Verifier):
    protocol = "matching"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        n = self.n = header.n
        q = max(n * n, 1)
        self.stream_fp = ctx.fingerprint(q)
        self.phase = -1
        self.k = None
        self.km = self.vm = self.vs = 0
        self.last = 0
        self.vm_claim = ctx.fingerprint(n)
        self.vm_list = ctx.fingerprint(n)
        self.m_rest = ctx.fingerprint(q)
        self.vs_list = ctx.fingerprint(n)
        self.vs_label = ctx.fingerprint(n)
        self.part = ctx.fingerprint(n)
        self.bfs = BfsChecker(ctx, n)
        self.es = LabelChecker(ctx, n, 1)
        self.comp_left = 0
        self.comp_root = 0
        self.odd = 0
        self.es_nodes = 0

    def on_stream(self, tok):
        self.stream_fp.update(edge_item(*tok.args[:2], self.n))

    def _strict(self, v):
        expect(1 <= v <= self.n, "domain", f"node {v}")
        expect(v > self.last, "structure", "list not strictly increasing")
        self.last = v

    def on_annotation(self, tok):
        tag, a = tok.tag, tok.args
        ph = _PHASES.get(tag)
        expect(ph is not None, "structure", f"unexpected {tag}")
        expect(ph >= self.phase and (ph == 0) == (self.phase == -1), "structure",
               f"{tag} out of place")
        if ph != self.phase:
            self.last = 0
            if self.phase == 5:
                self._close_component()
        self.phase = ph
        if tag == "CLAIM":
            expect(self.k is None and a[0] >= 0, "structure", "bad claim")
            self.k = a[0]
        elif tag == "MATCH-M":
            u, v = a
            expect(u != v, "matching", "self-loop in matching")
            self.km += 1
            self.vm_claim.update(u)
            self.vm_claim.update(v)
            self.m_rest.update(edge_item(u, v, self.n))
        elif tag == "MATCH-VM":
            self._strict(a[0])
            self.vm += 1
            self.vm_list.update(a[0])
        elif tag == "MATCH-REST":
            self.m_rest.update(edge_item(*a, self.n))
        elif tag == "MATCH-VS":
            self._strict(a[0])
            self.vs += 1
            self.vs_list.update(a[0])
            self.part.update(a[0])
        elif tag == "MATCH-COMP":
            self._close_component()
            expect(a[0] >= 1, "structure", "empty component")
            self.comp_left = a[0]
            self.odd += a[0] % 2
            self.comp_root = 0
            self.bfs.new_block()
        elif tag == "BFS-NODE":
            v, c, d, deg = a
            expect(self.comp_left > 0, "component", "too many nodes in component")
            if self.comp_root == 0:
                expect(c == v, "component", "component must be rooted at its first node")
                self.comp_root = v
            expect(c == self.comp_root, "component", "node outside its component")
            self.bfs.node_row(v, c, d, deg)
            self.part.update(v)
            self.comp_left -= 1
        elif tag == "BFS-LEVEL":
            expect(self.comp_left == 0, "component", "component node list incomplete")
            self.bfs.level_row(*a)
        elif tag == "BFS-EDGE":
            expect(self.comp_left == 0, "component", "component node list incomplete")
            expect(a[2] == self.comp_root, "component", "edge leaves its component")
            self.bfs.edge_row(*a)
        elif tag == "MATCH-ES-NODE":
            v, l, deg = a
            expect(l in (0, 1), "domain", "membership label must be 0 or 1")
            self.es.node_row(v, l, deg)
            self.es_nodes += 1
            if l:
                self.vs_label.update(v)
        else:
            u, v, lu, lv = a
            expect(lu == 1 or lv == 1, "separator", f"edge ({u},{v}) avoids V_S")
            self.es.edge_row(u, v, lu, lv)

    def _close_component(self):
        expect(self.comp_left == 0, "component", "component node list incomplete")

    def finish(self):
        expect(self.k is not None, "structure", "missing claim")
        if self.phase == 5:
            self._close_component()
        expect(self.vm_claim == self.vm_list, "matching", "endpoint list mismatch")
        expect(self.m_rest == self.stream_fp, "edges-mismatch", "M + rest differs from E")
        whole = range_fingerprint(self.ctx.fingerprint(self.n), 1, self.n)
        expect(self.part == whole, "partition", "components and V_S do not partition V")
        self.bfs.finish()
        expect(self.es_nodes == self.n, "structure", "E_S node list incomplete")
        expect(self.es.claimed == self.es.seen, "labels-inconsistent")
        expect(self.vs_label == self.vs_list, "separator", "labels disagree with V_S")
        expect(self.bfs.replay + self.es.replay == self.stream_fp, "edges-mismatch",
               "components and E_S do not cover E")
        expect(self.km == self.k and self.vm == 2 * self.k, "arithmetic", "matching size")
        expect(2 * self.k == self.vs - self.odd + self.n, "arithmetic", "Tutte-Berge bound")
        return Value(self.k)


def _gen(rng: random.Random, size: int):
    n = max(size, 1)
    m = rng.randint(0, 2 * n)
    edges = random_graph(rng, n, m, simple=rng.random() < 0.5, loops=rng.random() < 0.1)
    return graph_stream("graph", n, edges)


def _oracle(header, stream):
    from .oracles import max_matching_size
    return Value(max_matching_size(header.n, [t.args for t in stream]))


register(Protocol(
    name="matching",
    verifier=MatchingVerifier,
    prove=lambda h, s: matching_prove(h.n, [t.args for t in s])[1],
    gen=_gen,
    oracle=_oracle,
    schema={"CLAIM": "v", "MATCH-M": "nn", "MATCH-VM": "n", "MATCH-REST": "nn",
            "MATCH-VS": "n", "MATCH-COMP": "k", "MATCH-ES-NODE": "nfk",
            "MATCH-ES": "nnff", **BFS_SCHEMA},
))
