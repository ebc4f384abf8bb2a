"""Consistent Labels: force the helper to replay every edge with per-node labels.

The helper first lists nodes in increasing order as ``(v, label, deg)`` and
then replays the edge multiset, annotating each endpoint with a label.  The
verifier fingerprints ``{(v, l(v)): deg(v)}`` from the node rows, the
observed ``(endpoint, label)`` pairs from the edge rows, and the replayed
edges.  Equal fingerprints mean (whp) every occurrence of a node carried the
same label, each node occurred exactly ``deg(v)`` times, and the replay is
the stream's edge multiset.
"""

from __future__ import annotations

from collections import Counter
from typing import Callable, Iterable, Mapping

from .core import Accept, Context, Protocol, Verifier, expect, register
from .field import Fingerprint
from .stream import StreamHeader, T, Token


def edge_item(u: int, v: int, n: int, directed: bool = False) -> int:
    """Index of an edge in ``[1, n*n]``; undirected edges are normalised."""
    if not directed and u > v:
        u, v = v, u
    if not (1 <= u <= n and 1 <= v <= n):
        raise ValueError(f"edge ({u}, {v}) outside [1, {n}]")
    return (u - 1) * n + v


class LabelChecker:
    """O(1)-word state machine for one label-augmented edge list.

    ``node_row`` calls must precede ``edge_row`` calls.  ``finish`` compares
    against the caller's fingerprint of the stream edges.
    """

    def __init__(self, ctx: Context, n: int, lmax: int, directed: bool = False):
        self.n = n
        self.lmax = lmax
        self.directed = directed
        self.claimed = ctx.fingerprint(n * (lmax + 1))
        self.seen = ctx.fingerprint(n * (lmax + 1))
        self.replay = ctx.fingerprint(n * n)
        self.last_node = 0
        self.in_edges = False

    def _pair(self, v: int, label: int) -> int:
        expect(1 <= v <= self.n, "domain", f"node {v}")
        expect(0 <= label <= self.lmax, "domain", f"label {label}")
        return (v - 1) * (self.lmax + 1) + label + 1

    def node_row(self, v: int, label: int, deg: int) -> None:
        expect(not self.in_edges, "structure", "node row after edge rows")
        expect(v > self.last_node, "structure", "node rows not strictly increasing")
        expect(deg >= 0, "structure", "negative degree")
        self.last_node = v
        self.claimed.update(self._pair(v, label), deg)

    def edge_row(self, u: int, v: int, lu: int, lv: int) -> None:
        self.in_edges = True
        self.seen.update(self._pair(u, lu))
        self.seen.update(self._pair(v, lv))
        self.replay.update(edge_item(u, v, self.n, self.directed))

    def finish(self, stream_edges: Fingerprint) -> None:
        expect(self.claimed == self.seen, "labels-inconsistent")
        expect(self.replay == stream_edges, "edges-mismatch")


def degrees(edges: Iterable[tuple]) -> Counter:
    deg = Counter()
    for e in edges:
        deg[e[0]] += 1
        deg[e[1]] += 1
    return deg


def labels_prove(edges: list[tuple], labeling: Mapping[int, int],
                 node_tag: str = "NODE-ROW", edge_tag: str = "EDGE-ROW") -> list[Token]:
    """Honest label-augmented list: sorted node rows, then every edge."""
    deg = degrees(edges)
    out = [T(node_tag, v, labeling[v], deg[v]) for v in sorted(labeling)]
    out += [T(edge_tag, u, v, labeling[u], labeling[v]) for (u, v, *_) in edges]
    return out


def labels_verify(stream_edges: Fingerprint, annotation: Iterable[Token], ctx: Context, n: int,
                  lmax: int, on_edge: Callable[[int, int, int, int], None] | None = None,
                  directed: bool = False) -> Accept:
    """Stand-alone check of a label-augmented list; raises Reject on failure."""
    chk = LabelChecker(ctx, n, lmax, directed)
    for tok in annotation:
        if tok.tag == "NODE-ROW":
            chk.node_row(*tok.args)
        elif tok.tag == "EDGE-ROW":
            u, v, lu, lv = tok.args
            chk.edge_row(u, v, lu, lv)
            if on_edge is not None:
                on_edge(u, v, lu, lv)
        else:
            expect(False, "structure", f"unexpected {tok.tag}")
    chk.finish(stream_edges)
    return Accept()


class LabelsVerifier(Verifier):
    """Accepts iff the annotation is a valid label-augmented edge list."""

    protocol = "labels"

    def __init__(self, header: StreamHeader, ctx: Context):
        super().__init__(header, ctx)
        n = header.n
        self.stream_fp = ctx.fingerprint(n * n)
        self.chk = LabelChecker(ctx, n, n)

    def on_stream(self, tok):
        u, v = tok.args[:2]
        self.stream_fp.update(edge_item(u, v, self.header.n))

    def on_annotation(self, tok):
        if tok.tag == "NODE-ROW":
            v, l, d = tok.args
            self.chk.node_row(v, l, d)
        elif tok.tag == "EDGE-ROW":
            u, v, lu, lv = tok.args
            self.chk.edge_row(u, v, lu, lv)
        else:
            expect(False, "structure", f"unexpected {tok.tag}")

    def finish(self):
        self.chk.finish(self.stream_fp)
        return Accept()


def component_labels(n: int, edges: list[tuple]) -> dict[int, int]:
    """Label each node by the smallest node id in its connected component."""
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, *_ in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    return {v: find(v) for v in range(1, n + 1)}


def _prove(header, stream):
    edges = [t.args for t in stream]
    return labels_prove(edges, component_labels(header.n, edges))


def _gen(rng, size):
    from .graphs import graph_stream, random_graph
    n = size
    m = rng.randint(0, 2 * n)
    return graph_stream("graph", n, random_graph(rng, n, m, simple=False))


register(Protocol(
    name="labels",
    verifier=LabelsVerifier,
    prove=_prove,
    gen=_gen,
    oracle=lambda header, stream: Accept(),
    schema={"NODE-ROW": "nlk", "EDGE-ROW": "nnll"},
))
