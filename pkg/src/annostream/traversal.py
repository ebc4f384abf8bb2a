"""Augmented BFS and DFS transcripts, and bipartiteness.

BFS transcript layout::

    BFS-NODE v c d deg        (sorted by v; c is v's root, d its distance)
    BFS-LEVEL l v deg_l       (level l >= 1; deg_l(v) edges to level l-1)
    BFS-EDGE u v c du dv

Level rows for ``V_{l+1}`` come right before the edge group
``E_l = {e : min(du, dv) = l}``; the verifier checks that the sequence of
(group, phase) keys never decreases.  A node is a root iff ``d = 0`` iff
``c = v``.  Every edge stays inside one root's tree and changes distance by
at most one, and every non-root has ``deg_l >= 1`` neighbours one level up,
so the labels are exact hop distances from the roots.

DFS transcript layout (``T = m + 2n`` rows after the prologue)::

    DFS-PROLOGUE u level ntop tpush tpop occ      (sorted by u)
    DFS-PUSH u tpush tpop
    DFS-EDGE u v tpush_u tpop_u tpush_v tpop_v    (u is the current top)
    DFS-POP u v tpush_v tpop_v                    (v is the new top, 0 if none)

``occ(u)`` is the number of times ``u`` is mentioned with its timestamps in
the rows: once when pushed, once per incident edge endpoint and once per pop
that uncovers it.
"""

from __future__ import annotations

import random
from collections import deque

from .core import Accept, Protocol, Value, Verifier, expect, register
from .graphs import connected_graph, graph_stream, random_graph
from .labels import degrees, edge_item
from .stream import T, Token


class BfsChecker:
    """Constant-space checker for one augmented BFS transcript (or forest)."""

    def __init__(self, ctx, n: int):
        self.n = n
        b = (n, n, n)
        self.claimed = ctx.tuple_fingerprint(b)
        self.seen = ctx.tuple_fingerprint(b)
        self.replay = ctx.fingerprint(max(n * n, 1))
        self.lv_claim = ctx.tuple_fingerprint((n, n))
        self.lv_seen = ctx.tuple_fingerprint((n, n))
        self.cross_claim = ctx.tuple_fingerprint((n, n))
        self.cross_seen = ctx.tuple_fingerprint((n, n))
        self.last_node = 0
        self.in_body = False
        self.key_g, self.key_p = -1, 0

    def new_block(self) -> None:
        """Start another transcript sharing the same fingerprints."""
        self.last_node = 0
        self.in_body = False
        self.key_g, self.key_p = -1, 0

    def _advance(self, g: int, phase: int) -> None:
        expect((g, phase) >= (self.key_g, self.key_p), "order", "levels out of order")
        self.key_g, self.key_p = g, phase

    def node_row(self, v: int, c: int, d: int, deg: int) -> None:
        expect(not self.in_body, "structure", "node row after transcript body")
        expect(1 <= v <= self.n and 1 <= c <= self.n, "domain", f"node {v}")
        expect(v > self.last_node, "structure", "node rows not strictly increasing")
        expect(0 <= d < self.n and deg >= 0, "domain", "bad distance or degree")
        expect((d == 0) == (c == v), "root", f"node {v}: root iff distance 0")
        self.last_node = v
        self.claimed.update((v, c, d), deg)
        if d:
            self.lv_claim.update((v, d))

    def level_row(self, lev: int, v: int, degl: int) -> None:
        self.in_body = True
        expect(1 <= lev < self.n and 1 <= v <= self.n, "domain", "bad level row")
        expect(degl >= 1, "level", f"node {v} has no neighbour one level up")
        self._advance(lev - 1, 0)
        self.lv_seen.update((v, lev))
        self.cross_claim.update((v, lev), degl)

    def edge_row(self, u: int, v: int, c: int, du: int, dv: int) -> None:
        self.in_body = True
        expect(abs(du - dv) <= 1, "label-gap", f"edge ({u},{v}) spans {du},{dv}")
        self._advance(min(du, dv), 1)
        self.seen.update((u, c, du))
        self.seen.update((v, c, dv))
        self.replay.update(edge_item(u, v, self.n))
        if du + 1 == dv:
            self.cross_seen.update((v, dv))
        elif dv + 1 == du:
            self.cross_seen.update((u, du))

    def finish(self) -> None:
        expect(self.claimed == self.seen, "labels-inconsistent")
        expect(self.lv_claim == self.lv_seen, "level", "level rows do not cover the nodes")
        expect(self.cross_claim == self.cross_seen, "level", "cross-level degrees mismatch")


def bfs_labels(n: int, edges, nodes=None, roots=None) -> tuple[dict, dict]:
    """(root, distance) per node; by default one root per component (its
    smallest node), otherwise BFS from the given roots."""
    nodes = sorted(nodes) if nodes is not None else list(range(1, n + 1))
    adj = {v: [] for v in nodes}
    for u, v, *_ in edges:
        adj[u].append(v)
        adj[v].append(u)
    root, dist = {}, {}
    for s in (roots if roots is not None else nodes):
        if s in root:
            continue
        root[s], dist[s] = s, 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for w in sorted(adj[u]):
                if w not in root:
                    root[w], dist[w] = s, dist[u] + 1
                    dq.append(w)
    return root, dist


def bfs_transcript(edges, root: dict, dist: dict) -> list[Token]:
    deg = degrees(edges)
    out = [T("BFS-NODE", v, root[v], dist[v], deg[v]) for v in sorted(root)]
    up = {}
    groups: dict[int, list] = {}
    for u, v, *_ in edges:
        du, dv = dist[u], dist[v]
        groups.setdefault(min(du, dv), []).append((u, v))
        if du + 1 == dv:
            up[v] = up.get(v, 0) + 1
        elif dv + 1 == du:
            up[u] = up.get(u, 0) + 1
    by_level: dict[int, list] = {}
    for v in sorted(root):
        if dist[v]:
            by_level.setdefault(dist[v], []).append(v)
    top = max(dist.values(), default=0)
    for lev in range(top + 1):
        out += [T("BFS-LEVEL", lev + 1, v, up[v]) for v in by_level.get(lev + 1, [])]
        out += [T("BFS-EDGE", u, v, root[u], dist[u], dist[v]) for u, v in groups.get(lev, [])]
    return out


BFS_SCHEMA = {"BFS-NODE": "nnlk", "BFS-LEVEL": "lnk", "BFS-EDGE": "nnnll"}


class _BfsLike(Verifier):
    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        self.n = header.n
        self.stream_fp = ctx.fingerprint(max(self.n * self.n, 1))
        self.chk = BfsChecker(ctx, self.n)
        self.nodes = 0

    def on_stream(self, tok):
        self.stream_fp.update(edge_item(*tok.args[:2], self.n))

    def on_node(self, v, c, d, deg):
        pass

    def on_edge(self, u, v, c, du, dv):
        pass

    def on_annotation(self, tok):
        tag, a = tok.tag, tok.args
        if tag == "BFS-NODE":
            self.chk.node_row(*a)
            self.nodes += 1
            self.on_node(*a)
        elif tag == "BFS-LEVEL":
            self.chk.level_row(*a)
        elif tag == "BFS-EDGE":
            self.chk.edge_row(*a)
            self.on_edge(*a)
        else:
            expect(False, "structure", f"unexpected {tag}")

    def finish(self):
        expect(self.nodes == self.n, "structure", "every node needs a row")
        self.chk.finish()
        expect(self.chk.replay == self.stream_fp, "edges-mismatch")


class BfsVerifier(_BfsLike):
    """Accepts a BFS transcript rooted at header ``s``."""

    protocol = "bfs"

    def on_node(self, v, c, d, deg):
        expect(c == self.header.s, "root", "single root s expected")

    def finish(self):
        super().finish()
        return Accept()


class BipartiteVerifier(_BfsLike):
    """One BFS tree per component; bipartite iff no edge joins equal levels."""

    protocol = "bipartite"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        self.odd = 0

    def on_edge(self, u, v, c, du, dv):
        if du == dv:
            self.odd = 1

    def finish(self):
        super().finish()
        return Value(1 - self.odd)


def bfs_prove(n: int, edges, s: int) -> list[Token]:
    root, dist = bfs_labels(n, edges, roots=[s])
    if len(root) != n:
        raise ValueError("graph is not connected from s")
    return bfs_transcript(edges, root, dist)


def bipartite_prove(n: int, edges) -> tuple[bool, list[Token]]:
    root, dist = bfs_labels(n, edges)
    ok = all(dist[u] != dist[v] for u, v, *_ in edges)
    return ok, bfs_transcript(edges, root, dist)


# --- DFS ----------------------------------------------------------------------

def dfs_run(n: int, edges, s: int) -> list[tuple]:
    """Rows ('push', u) / ('edge', u, v) / ('pop', u) of a real DFS from ``s``
    exploring lower neighbour ids first.  Every edge is presented once, from
    whichever endpoint is on top when it is first examined."""
    inc = [[] for _ in range(n + 1)]
    for i, (u, v, *_) in enumerate(edges):
        inc[u].append((v, i))
        if u != v:
            inc[v].append((u, i))
    for lst in inc:
        lst.sort()
    used = [False] * len(edges)
    ptr = [0] * (n + 1)
    pushed = [False] * (n + 1)
    rows = [("push", s)]
    pushed[s] = True
    stack = [s]
    while stack:
        u = stack[-1]
        while ptr[u] < len(inc[u]) and used[inc[u][ptr[u]][1]]:
            ptr[u] += 1
        if ptr[u] == len(inc[u]):
            stack.pop()
            rows.append(("pop", u))
            continue
        w, i = inc[u][ptr[u]]
        used[i] = True
        rows.append(("edge", u, w))
        if not pushed[w]:
            pushed[w] = True
            stack.append(w)
            rows.append(("push", w))
    if not all(pushed[1:]):
        raise ValueError("graph is not connected")
    return rows


def dfs_prove(n: int, edges, s: int) -> list[Token]:
    rows = dfs_run(n, edges, s)
    tpush, tpop, level, ntop, occ = {}, {}, {}, {}, {}
    stack = []
    for t, r in enumerate(rows, start=1):
        if r[0] == "push":
            stack.append(r[1])
            tpush[r[1]] = t
            level[r[1]] = len(stack)
            occ[r[1]] = occ.get(r[1], 0) + 1
        elif r[0] == "pop":
            stack.pop()
            tpop[r[1]] = t
            if stack:
                occ[stack[-1]] = occ.get(stack[-1], 0) + 1
        else:
            occ[r[1]] = occ.get(r[1], 0) + 1
            occ[r[2]] = occ.get(r[2], 0) + 1
        if stack:
            ntop[stack[-1]] = ntop.get(stack[-1], 0) + 1
    out = [T("DFS-PROLOGUE", u, level[u], ntop.get(u, 0), tpush[u], tpop[u], occ[u])
           for u in range(1, n + 1)]
    stack = []
    for t, r in enumerate(rows, start=1):
        if r[0] == "push":
            u = r[1]
            stack.append(u)
            out.append(T("DFS-PUSH", u, tpush[u], tpop[u]))
        elif r[0] == "edge":
            u, v = r[1], r[2]
            out.append(T("DFS-EDGE", u, v, tpush[u], tpop[u], tpush[v], tpop[v]))
        else:
            stack.pop()
            if stack:
                v = stack[-1]
                out.append(T("DFS-POP", r[1], v, tpush[v], tpop[v]))
            else:
                out.append(T("DFS-POP", r[1], 0, 0, 0))
    return out


class DfsVerifier(Verifier):
    """Accepts a valid augmented DFS transcript from header ``s``."""

    protocol = "dfs"

    def __init__(self, header, ctx):
        super().__init__(header, ctx)
        n = self.n = header.n
        self.tmax = header.m + 2 * n
        tm = self.tmax
        self.stream_fp = ctx.fingerprint(max(n * n, 1))
        self.replay = ctx.fingerprint(max(n * n, 1))
        self.f1 = ctx.tuple_fingerprint((n, n))
        self.f2 = ctx.tuple_fingerprint((n, n))
        self.stamp_claim = ctx.tuple_fingerprint((n, tm, tm))
        self.stamp_seen = ctx.tuple_fingerprint((n, tm, tm))
        self.push_claim = ctx.tuple_fingerprint((n, tm))
        self.push_seen = ctx.tuple_fingerprint((n, tm))
        self.pop_claim = ctx.tuple_fingerprint((n, tm))
        self.pop_seen = ctx.tuple_fingerprint((n, tm))
        self.last = 0
        self.t = 0
        self.height = 0
        self.top = self.top_push = self.top_pop = 0
        self.pending = 0

    def on_stream(self, tok):
        self.stream_fp.update(edge_item(*tok.args[:2], self.n))

    def _stamp(self, u, a, b):
        expect(1 <= u <= self.n and 1 <= a < b <= self.tmax, "timestamp",
               f"node {u}: bad stamps ({a}, {b})")
        self.stamp_seen.update((u, a, b))

    def on_annotation(self, tok):
        tag, a = tok.tag, tok.args
        if tag == "DFS-PROLOGUE":
            u, level, ntop, tpush, tpop, occ = a
            expect(self.t == 0, "structure", "prologue after rows")
            expect(u == self.last + 1, "structure", "prologue must list nodes 1..n in order")
            expect(1 <= level <= self.n and ntop >= 0 and occ >= 0, "domain", "bad prologue row")
            expect(1 <= tpush < tpop <= self.tmax, "timestamp", f"node {u}")
            self.last = u
            self.f1.update((u, level), ntop)
            self.stamp_claim.update((u, tpush, tpop), occ)
            self.push_claim.update((u, tpush))
            self.pop_claim.update((u, tpop))
            return
        expect(self.last == self.n, "structure", "prologue incomplete")
        self.t += 1
        t = self.t
        expect(t <= self.tmax, "structure", "too many rows")
        if self.pending:
            expect(tag == "DFS-PUSH" and a[0] == self.pending, "push",
                   "a newly discovered node must be pushed next")
        if tag == "DFS-PUSH":
            u, tpush, tpop = a
            if t == 1:
                expect(u == self.header.get("s", 1), "root", "transcript must start at s")
            else:
                expect(u == self.pending, "push", f"push({u}) without discovery")
            expect(tpush == t, "timestamp", "push time mismatch")
            self._stamp(u, tpush, tpop)
            self.push_seen.update((u, t))
            self.pending = 0
            self.height += 1
            self.top, self.top_push, self.top_pop = u, tpush, tpop
        elif tag == "DFS-EDGE":
            u, v, pu, qu, pv, qv = a
            expect(self.height > 0 and u == self.top, "not-top", f"edge ({u},{v}) not at top")
            expect((pu, qu) == (self.top_push, self.top_pop), "timestamp", "top stamps differ")
            expect(pv <= t + 1, "timestamp", f"node {v} pushed in the future")
            expect(qv > t, "timestamp", f"node {v} already popped")
            self._stamp(u, pu, qu)
            self._stamp(v, pv, qv)
            self.replay.update(edge_item(u, v, self.n))
            if pv == t + 1:
                self.pending = v
        elif tag == "DFS-POP":
            u, v, pv, qv = a
            expect(self.height > 0 and u == self.top, "not-top", f"pop({u}) not at top")
            expect(self.top_pop == t, "timestamp", "pop time mismatch")
            self.pop_seen.update((u, t))
            self.height -= 1
            if self.height:
                expect(pv < t < qv, "new-top", f"node {v} cannot be the top at {t}")
                self._stamp(v, pv, qv)
                self.top, self.top_push, self.top_pop = v, pv, qv
            else:
                expect((v, pv, qv) == (0, 0, 0), "new-top", "stack should be empty")
                expect(t == self.tmax, "structure", "stack emptied early")
                self.top = self.top_push = self.top_pop = 0
        else:
            expect(False, "structure", f"unexpected {tag}")
        if self.height:
            self.f2.update((self.top, self.height))

    def finish(self):
        expect(self.t == self.tmax, "structure", f"expected {self.tmax} rows, got {self.t}")
        expect(self.pending == 0, "push", "discovered node never pushed")
        expect(self.f1 == self.f2, "height", "levels or top counts inconsistent")
        expect(self.stamp_claim == self.stamp_seen, "labels-inconsistent")
        expect(self.push_claim == self.push_seen, "push", "pushes do not match prologue")
        expect(self.pop_claim == self.pop_seen, "pop", "pops do not match prologue")
        expect(self.replay == self.stream_fp, "edges-mismatch")
        return Accept()


# --- registration ---------------------------------------------------------------

def _connected(rng: random.Random, size: int, kind="graph"):
    n = max(size, 1)
    m = rng.randint(n - 1, 2 * n) if n > 1 else 0
    edges = connected_graph(rng, n, m, simple=rng.random() < 0.7)
    h, s = graph_stream(kind, n, edges)
    h.params["s"] = rng.randint(1, n)
    return h, s


def _gen_bipartite(rng: random.Random, size: int):
    n = max(size, 1)
    m = rng.randint(0, 2 * n)
    if rng.random() < 0.5:
        side = {v: rng.randint(0, 1) for v in range(1, n + 1)}
        edges = [e for e in random_graph(rng, n, 3 * m, simple=False) if side[e[0]] != side[e[1]]][:m]
    else:
        edges = random_graph(rng, n, m, simple=False, loops=rng.random() < 0.1)
    return graph_stream("graph", n, edges)


def _bfs_oracle(header, stream):
    return Accept()


def _bip_oracle(header, stream):
    from .oracles import is_bipartite
    return Value(int(is_bipartite(header.n, [t.args for t in stream])))


def _shift_level(tokens, rng):
    """Consistently move one non-root node a level up or down and rebuild."""
    root = {t.args[0]: t.args[1] for t in tokens if t.tag == "BFS-NODE"}
    dist = {t.args[0]: t.args[2] for t in tokens if t.tag == "BFS-NODE"}
    edges = [t.args[:2] for t in tokens if t.tag == "BFS-EDGE"]
    movable = [v for v in dist if dist[v] > 0]
    if not movable:
        return None
    v = rng.choice(movable)
    dist[v] += -1 if dist[v] > 1 and rng.random() < 0.5 else 1
    try:
        return bfs_transcript(edges, root, dist)
    except KeyError:
        return None


def _shift_ntop(tokens, rng):
    """Move one unit of top-count between two nodes in the prologue."""
    rows = [i for i, t in enumerate(tokens) if t.tag == "DFS-PROLOGUE"]
    donors = [i for i in rows if tokens[i].args[2] > 0]
    if len(rows) < 2 or not donors:
        return None
    i = rng.choice(donors)
    j = rng.choice([r for r in rows if r != i])
    out = list(tokens)
    a, b = list(out[i].args), list(out[j].args)
    a[2] -= 1
    b[2] += 1
    out[i], out[j] = Token("DFS-PROLOGUE", tuple(a)), Token("DFS-PROLOGUE", tuple(b))
    return out


register(Protocol(
    name="bfs",
    verifier=BfsVerifier,
    prove=lambda h, s: bfs_prove(h.n, [t.args for t in s], h.s),
    gen=_connected,
    oracle=_bfs_oracle,
    schema=BFS_SCHEMA,
    wrong_answer=_shift_level,
))

register(Protocol(
    name="bipartite",
    verifier=BipartiteVerifier,
    prove=lambda h, s: bipartite_prove(h.n, [t.args for t in s])[1],
    gen=_gen_bipartite,
    oracle=_bip_oracle,
    schema=BFS_SCHEMA,
    wrong_answer=_shift_level,
))

register(Protocol(
    name="dfs",
    verifier=DfsVerifier,
    prove=lambda h, s: dfs_prove(h.n, [t.args for t in s], h.s),
    gen=_connected,
    oracle=_bfs_oracle,
    schema={"DFS-PROLOGUE": "nlkttk", "DFS-PUSH": "ntt", "DFS-EDGE": "nntttt",
            "DFS-POP": "nntt"},
    wrong_answer=_shift_ntop,
))
