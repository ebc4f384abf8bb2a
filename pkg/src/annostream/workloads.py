"""Instances with explicit size parameters, for the CLI and the benches.

``make_instance(name, rng, n=.., m=..)`` builds one stream for protocol
``name``; omitted sizes get small defaults.  Graph protocols that need
connectivity repair the drawn graph so ``m`` is a lower bound there.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .graphs import connected_graph, graph_stream, random_dag, random_graph
from .stream import StreamHeader


class UsageError(ValueError):
    pass


def _graph_sizes(n, m, default_ratio=2):
    n = 16 if n is None else n
    if n < 1:
        raise UsageError("n must be at least 1")
    m = default_ratio * n if m is None else m
    if m < 0 or m > n * n:
        raise UsageError(f"m = {m} is infeasible for n = {n}")
    return n, m


def _weighted(rng, pairs, wmax, wmin=0):
    return [(u, v, rng.randint(wmin, wmax)) for u, v in pairs]


def _labels(rng, n, m, **_):
    n, m = _graph_sizes(n, m)
    return graph_stream("graph", n, random_graph(rng, n, m, simple=False))


def _dag(rng, n, m, **_):
    n, m = _graph_sizes(n, m)
    return graph_stream("digraph", n, random_dag(rng, n, m))


def _matching(rng, n, m, **_):
    n, m = _graph_sizes(n, m)
    return graph_stream("graph", n, random_graph(rng, n, m, simple=False))


def _connected(rng, n, m, kind="graph", **_):
    n, m = _graph_sizes(n, m)
    h, s = graph_stream(kind, n, connected_graph(rng, n, m, simple=False))
    h.params["s"] = rng.randint(1, n)
    return h, s


def _bipartite(rng, n, m, **_):
    n, m = _graph_sizes(n, m)
    side = {v: rng.randint(0, 1) for v in range(1, n + 1)}
    left = [v for v in side if side[v] == 0] or [1]
    right = [v for v in side if side[v] == 1] or [1]
    edges = [(rng.choice(left), rng.choice(right)) for _ in range(m)]
    return graph_stream("graph", n, edges)


def _st(problem):
    def build(rng, n, m, **_):
        n, m = _graph_sizes(n, m)
        if n < 2:
            raise UsageError("s-t problems need n >= 2")
        wmax = 20
        reach = problem == "spath"
        s, t = rng.sample(range(1, n + 1), 2)
        edges = _weighted(rng, random_graph(rng, n, m, simple=False),
                          wmax, 0 if reach else 1)
        if reach:
            mids = rng.sample([v for v in range(1, n + 1) if v not in (s, t)], min(n - 2, 3))
            path = [s, *mids, t]
            edges[: len(path) - 1] = [(a, b, rng.randint(0, wmax)) for a, b in zip(path, path[1:])]
            rng.shuffle(edges)
        return graph_stream("wdigraph", n, edges, s=s, t=t, wmax=wmax)
    return build


def _mwbpm(rng, n, m, **_):
    from .tum import perfect_bipartite
    n, m = _graph_sizes(n, m)
    if n < 2 or n % 2:
        raise UsageError("mwbpm needs an even n >= 2")
    nl = n // 2
    return graph_stream("wgraph", n, perfect_bipartite(rng, nl, max(m, nl)), nl=nl, wmax=20)


def _lp(rng, b, c, **_):
    from .lp import lp_stream, random_lp
    b, c = b or 4, c or 3
    if b < 1 or c < 1 or c > b:
        raise UsageError("lp needs 1 <= c <= b")
    return lp_stream(rng, random_lp(rng, b, c))


def _lptrade(rng, b, c, alpha, **_):
    from .lp import lp_stream
    from .matvec import random_integer_lp
    b, c = b or 4, c or 3
    if b < 1 or c < 1 or c > b:
        raise UsageError("lptrade needs 1 <= c <= b")
    h, toks = lp_stream(rng, random_integer_lp(rng, b, c))
    toks = [t for t in toks if all(isinstance(v, int) for v in t.args)]
    return StreamHeader("lp", {**h.params, "alpha": _alpha(alpha), "m": len(toks)}), toks


def _alpha(alpha):
    a = Fraction(1, 2) if alpha is None else Fraction(alpha)
    if not 0 <= a <= 1:
        raise UsageError("alpha must lie in [0, 1]")
    return a.numerator if a.denominator == 1 else a


def _matvec(rng, b, c, alpha, m=None, **_):
    from .matvec import random_matrix_stream
    b, c = b or 8, c or 8
    if b < 1 or c < 1:
        raise UsageError("matvec needs b, c >= 1")
    return random_matrix_stream(rng, b, c, _alpha(alpha), 2 * b if m is None else m)


def _eigen(rng, n, alpha, **_):
    from .matvec import _gen_eigen
    h, s = _gen_eigen(rng, 8 if n is None else n)
    h.params["alpha"] = _alpha(alpha)
    return h, s


def _resistance(rng, n, m, alpha, **_):
    n, m = _graph_sizes(n or 8, m)
    if n < 2:
        raise UsageError("resistance needs n >= 2")
    edges = _weighted(rng, connected_graph(rng, n, m, simple=False), 3, 1)
    s, t = rng.sample(range(1, n + 1), 2)
    return graph_stream("wgraph", n, edges, s=s, t=t, alpha=_alpha(alpha))


def _diameter(rng, n, m, **_):
    n, m = _graph_sizes(n, m)
    return graph_stream("graph", n, connected_graph(rng, n, m, simple=False))


def _memcheck(rng, n, m, **_):
    from .memcheck import random_transcript
    n = 16 if n is None else n
    if n < 1:
        raise UsageError("n (address space) must be at least 1")
    return random_transcript(rng, 4 * n if m is None else m, n)


def _sim(kind, connected):
    def build(rng, n, m, **_):
        n, m = _graph_sizes(n, m)
        wmax = 100
        pairs = (connected_graph(rng, n, m, simple=False) if connected
                 else random_graph(rng, n, m, simple=False))
        h, s = graph_stream(kind, n, _weighted(rng, pairs, wmax), wmax=wmax)
        h.params["s"] = 1
        return h, s
    return build


BUILDERS = {
    "labels": _labels,
    "dag": _dag,
    "bfs": _connected,
    "bipartite": _bipartite,
    "dfs": _connected,
    "matching": _matching,
    "lp": _lp,
    "spath": _st("spath"),
    "maxflow": _st("maxflow"),
    "mincut": _st("mincut"),
    "mwbpm": _mwbpm,
    "matvec": _matvec,
    "lptrade": _lptrade,
    "eigen": _eigen,
    "resistance": _resistance,
    "diameter": _diameter,
    "memcheck": _memcheck,
    "mst": _sim("wgraph", True),
    "sssp": _sim("wgraph", True),
    "apsp": _sim("wdigraph", False),
}


def make_instance(name: str, rng: random.Random, n=None, m=None, b=None, c=None, alpha=None):
    if name not in BUILDERS:
        raise UsageError(f"unknown protocol {name!r}")
    return BUILDERS[name](rng, n=n, m=m, b=b, c=c, alpha=alpha)
