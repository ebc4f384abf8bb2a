"""Independent reference answers used by tests and the completeness harness.

Nothing here shares code with the provers.  Graph answers come from networkx
where it has the algorithm; small exhaustive searches cover the rest.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import networkx as nx


def _multigraph(n, edges, directed=False):
    g = nx.MultiDiGraph() if directed else nx.MultiGraph()
    g.add_nodes_from(range(1, n + 1))
    g.add_edges_from((e[0], e[1]) for e in edges)
    return g


def is_acyclic(n: int, edges) -> bool:
    return nx.is_directed_acyclic_graph(_multigraph(n, edges, directed=True))


def max_matching_size(n: int, edges) -> int:
    g = nx.Graph()
    g.add_nodes_from(range(1, n + 1))
    g.add_edges_from((u, v) for u, v, *_ in edges if u != v)
    return len(nx.max_weight_matching(g, maxcardinality=True))


def max_matching_brute(n: int, edges) -> int:
    """Exhaustive search over edge subsets, pruned by degree; n <= 12."""
    simple = sorted({(min(u, v), max(u, v)) for u, v, *_ in edges if u != v})
    best = 0

    def rec(i, used, size):
        nonlocal best
        if size + (n - len(used)) // 2 <= best:
            return
        best = max(best, size)
        for j in range(i, len(simple)):
            u, v = simple[j]
            if u not in used and v not in used:
                rec(j + 1, used | {u, v}, size + 1)

    rec(0, frozenset(), 0)
    return best


def odd_components(n: int, edges, removed) -> int:
    g = nx.Graph()
    g.add_nodes_from(v for v in range(1, n + 1) if v not in removed)
    g.add_edges_from((u, v) for u, v, *_ in edges if u not in removed and v not in removed)
    return sum(len(c) % 2 for c in nx.connected_components(g))


def tutte_berge_bound(n: int, edges) -> int:
    """min over all V' of (|V'| - odd(G - V') + n) / 2, by enumeration."""
    best = n
    for r in range(n + 1):
        for sub in itertools.combinations(range(1, n + 1), r):
            best = min(best, (r - odd_components(n, edges, set(sub)) + n) // 2)
    return best


def bfs_distances(n: int, edges, s: int) -> dict[int, int]:
    return dict(nx.single_source_shortest_path_length(_multigraph(n, edges), s))


def is_bipartite(n: int, edges) -> bool:
    if any(u == v for u, v, *_ in edges):
        return False
    return nx.is_bipartite(_multigraph(n, edges))


def dijkstra(n: int, edges, s: int, directed=False) -> dict[int, int]:
    g = nx.DiGraph() if directed else nx.Graph()
    g.add_nodes_from(range(1, n + 1))
    for u, v, w in edges:
        if g.has_edge(u, v) and g[u][v]["weight"] <= w:
            continue
        g.add_edge(u, v, weight=w)
    return dict(nx.single_source_dijkstra_path_length(g, s))


def floyd_warshall(n: int, edges, directed=True) -> dict[tuple[int, int], int]:
    g = nx.DiGraph() if directed else nx.Graph()
    g.add_nodes_from(range(1, n + 1))
    for u, v, w in edges:
        if g.has_edge(u, v) and g[u][v]["weight"] <= w:
            continue
        g.add_edge(u, v, weight=w)
    dist = nx.floyd_warshall(g)
    return {(u, v): int(d) for u, row in dist.items() for v, d in row.items() if d != float("inf")}


def mst_weight(n: int, edges) -> int:
    g = nx.MultiGraph()
    g.add_nodes_from(range(1, n + 1))
    for u, v, w in edges:
        g.add_edge(u, v, weight=w)
    return int(sum(d["weight"] for *_, d in nx.minimum_spanning_edges(g, data=True)))


def max_flow(n: int, edges, s: int, t: int) -> int:
    g = nx.DiGraph()
    g.add_nodes_from(range(1, n + 1))
    for u, v, c in edges:
        if u == v:
            continue
        if g.has_edge(u, v):
            g[u][v]["capacity"] += c
        else:
            g.add_edge(u, v, capacity=c)
    return nx.maximum_flow_value(g, s, t)


def min_cut(n: int, edges, s: int, t: int) -> int:
    """Brute force over s-sides of the cut; n <= 16."""
    others = [v for v in range(1, n + 1) if v not in (s, t)]
    best = None
    for r in range(len(others) + 1):
        for sub in itertools.combinations(others, r):
            side = {s, *sub}
            cut = sum(c for u, v, c in edges if u in side and v not in side)
            best = cut if best is None else min(best, cut)
    return best


def mwbpm(nl: int, n: int, edges) -> int:
    """Minimum-weight perfect matching between 1..nl and nl+1..n.

    Maximum-cardinality matching on weights ``W - w`` picks a perfect
    matching of least total ``w``.
    """
    W = 1 + max((w for _, _, w in edges), default=0)
    g = nx.Graph()
    for u, v, w in edges:
        if not g.has_edge(u, v) or g[u][v]["w"] > w:
            g.add_edge(u, v, w=w, weight=W - w)
    m = nx.max_weight_matching(g, maxcardinality=True)
    if 2 * len(m) != n:
        raise ValueError("no perfect matching")
    return sum(g[u][v]["w"] for u, v in m)


def diameter(n: int, edges) -> int:
    return nx.diameter(_multigraph(n, edges))


def effective_resistance(n: int, edges, s: int, t: int) -> Fraction:
    """Exact resistance by grounding ``s`` and solving with sympy."""
    import sympy
    L = sympy.zeros(n, n)
    for u, v, w in edges:
        if u == v:
            continue
        L[u - 1, u - 1] += w
        L[v - 1, v - 1] += w
        L[u - 1, v - 1] -= w
        L[v - 1, u - 1] -= w
    keep = [i for i in range(n) if i != s - 1]
    red = L.extract(keep, keep)
    rhs = sympy.zeros(n - 1, 1)
    rhs[keep.index(t - 1), 0] = 1
    x = red.LUsolve(rhs)
    r = x[keep.index(t - 1), 0]
    return Fraction(int(r.p), int(r.q))


def matvec(b: int, c: int, entries, xs) -> list[int]:
    """Dense product with summed duplicate entries."""
    import numpy as np
    A = np.zeros((b, c), dtype=object)
    x = np.zeros(c, dtype=object)
    for i, j, v in entries:
        A[i - 1, j - 1] += v
    for j, v in xs:
        x[j - 1] += v
    return [int(v) for v in A.dot(x)]


def is_eigenpair(n: int, entries, lam: int) -> bool:
    """Whether ``lam`` is an eigenvalue of the integer matrix, exactly."""
    import sympy
    M = sympy.zeros(n, n)
    for i, j, v in entries:
        M[i - 1, j - 1] += v
    return (M - lam * sympy.eye(n)).det() == 0


def _solve_square(M, rhs):
    """Gauss-Jordan on a square Fraction system; None if singular."""
    k = len(M)
    aug = [list(r) + [v] for r, v in zip(M, rhs)]
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(k):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][k] for r in range(k)]


def lp_optimum(b: int, c: int, A, bv, cv) -> Fraction:
    """min c.x s.t. Ax <= b by enumerating vertices (full column rank A)."""
    Z = Fraction(0)
    M = [[Fraction(A.get((i, j), 0)) for j in range(1, c + 1)] for i in range(1, b + 1)]
    rhs = [Fraction(bv.get(i, 0)) for i in range(1, b + 1)]
    cost = [Fraction(cv.get(j, 0)) for j in range(1, c + 1)]
    best = None
    for rows in itertools.combinations(range(b), c):
        x = _solve_square([M[r] for r in rows], [rhs[r] for r in rows])
        if x is None:
            continue
        if all(sum((a * v for a, v in zip(M[i], x)), Z) <= rhs[i] for i in range(b)):
            val = sum((a * v for a, v in zip(cost, x)), Z)
            best = val if best is None else min(best, val)
    if best is None:
        raise ValueError("no feasible vertex")
    return best


def memory_replay(rows) -> bool:
    """Replay (op, addr, value) rows against a dict; reads must match."""
    mem = {}
    for op, addr, val in rows:
        if op == "w":
            mem[addr] = val
        elif mem.get(addr, 0) != val:
            return False
    return True
