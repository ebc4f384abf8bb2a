"""Seeded random instance generators and small graph utilities."""

from __future__ import annotations

import random
from collections import deque

from .stream import StreamHeader, T


def graph_stream(kind: str, n: int, edges: list[tuple], **params) -> tuple[StreamHeader, list]:
    header = StreamHeader(kind, {"n": n, "m": len(edges), **params})
    return header, [T("e", *e) for e in edges]


def edges_of(stream) -> list[tuple]:
    return [tuple(t.args) for t in stream if t.tag == "e"]


def random_graph(rng: random.Random, n: int, m: int, simple: bool = True,
                 loops: bool = False) -> list[tuple[int, int]]:
    """G(n, m): ``m`` edges drawn uniformly; without replacement if simple."""
    if n <= 0:
        return []
    if simple:
        cap = n * (n - 1) // 2 + (n if loops else 0)
        m = min(m, cap)
        seen: set = set()
        out = []
        while len(out) < m:
            u, v = rng.randint(1, n), rng.randint(1, n)
            if u == v and not loops:
                continue
            key = (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
            out.append((u, v) if rng.random() < 0.5 else (v, u))
        return out
    out = []
    for _ in range(m):
        u, v = rng.randint(1, n), rng.randint(1, n)
        while u == v and not loops and n > 1:
            v = rng.randint(1, n)
        if u == v and not loops:
            continue
        out.append((u, v))
    return out


def connect(rng: random.Random, n: int, edges: list[tuple], weight=None) -> list[tuple]:
    """Connected-repair pass: join components with random bridging edges."""
    comp = components(n, edges)
    roots = sorted({comp[v] for v in range(1, n + 1)})
    if len(roots) <= 1:
        return list(edges)
    members: dict[int, list[int]] = {}
    for v in range(1, n + 1):
        members.setdefault(comp[v], []).append(v)
    out = list(edges)
    order = list(roots)
    rng.shuffle(order)
    for a, b in zip(order, order[1:]):
        u, v = rng.choice(members[a]), rng.choice(members[b])
        out.append((u, v) if weight is None else (u, v, weight(rng)))
    rng.shuffle(out)
    return out


def connected_graph(rng: random.Random, n: int, m: int, simple: bool = True) -> list[tuple]:
    """Random connected graph with ``max(m, n-1)`` edges: a random spanning
    tree plus uniformly drawn extra edges."""
    if n <= 1:
        return []
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    out = [(perm[i], perm[rng.randrange(i)]) for i in range(1, n)]
    seen = {(min(u, v), max(u, v)) for u, v in out}
    cap = n * (n - 1) // 2 if simple else float("inf")
    target = min(max(m, n - 1), cap)
    while len(out) < target:
        u, v = rng.randint(1, n), rng.randint(1, n)
        if u == v:
            continue
        k = (min(u, v), max(u, v))
        if simple and k in seen:
            continue
        seen.add(k)
        out.append((u, v))
    rng.shuffle(out)
    return out


def random_dag(rng: random.Random, n: int, m: int) -> list[tuple[int, int]]:
    """Random DAG: edges respect a hidden random permutation."""
    if n < 2:
        return []
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    out = []
    for _ in range(m):
        i, j = sorted(rng.sample(range(n), 2))
        out.append((perm[i], perm[j]))
    return out


def adjacency(n: int, edges, directed: bool = False) -> list[list[int]]:
    adj = [[] for _ in range(n + 1)]
    for u, v, *_ in edges:
        adj[u].append(v)
        if not directed and u != v:
            adj[v].append(u)
    return adj


def components(n: int, edges) -> list[int]:
    """Component representative (smallest node id) per node, index 0 unused."""
    adj = adjacency(n, edges)
    comp = [0] * (n + 1)
    for s in range(1, n + 1):
        if comp[s]:
            continue
        comp[s] = s
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for w in adj[u]:
                if not comp[w]:
                    comp[w] = s
                    dq.append(w)
    return comp


def bfs_distances(n: int, edges, s: int, directed: bool = False) -> list[int]:
    """Hop distances from ``s``; -1 where unreachable.  Index 0 unused."""
    adj = adjacency(n, edges, directed)
    dist = [-1] * (n + 1)
    dist[s] = 0
    dq = deque([s])
    while dq:
        u = dq.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                dq.append(w)
    return dist


def is_connected(n: int, edges) -> bool:
    if n <= 1:
        return True
    return all(d >= 0 for d in bfs_distances(n, edges, 1)[1:])
