import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annostream import Bottom, Value
from annostream.graphs import bfs_distances, connected_graph, graph_stream
from annostream.power import MULTIPLY, SQUARE, _Lagrange, chi, diameter_prove, schedule
from annostream.stream import T

from conftest import run, run_graph


def power_of(ops):
    e = 1
    for op in ops:
        e = 2 * e if op == SQUARE else e + 1
    return e


@pytest.mark.parametrize("l", range(2, 40))
def test_schedule_reaches_l(l):
    ops = schedule(l)
    assert power_of(ops) == l and ops[-1] == MULTIPLY
    assert power_of(ops[:-1]) == l - 1


def test_lagrange_walker_matches_direct():
    p = 2 ** 61 - 1
    walker = _Lagrange(7, 123456, p)
    for _ in range(2):
        assert [walker.next() for _ in range(7)] == [chi(7, j, 123456, p) for j in range(1, 8)]


@pytest.mark.parametrize("n,edges,want", [
    (3, [(1, 2), (2, 3), (1, 3)], 1),
    (4, [(1, 2), (2, 3), (3, 4)], 3),
    (5, [(1, 2), (1, 3), (1, 4), (1, 5)], 2),
    (2, [(1, 2)], 1),
])
def test_examples(n, edges, want):
    assert run_graph("diameter", "graph", n, edges)[0] == Value(want)


def test_wrong_zero_cell_rejected():
    header, stream = graph_stream("graph", 4, [(1, 2), (2, 3), (3, 4)])
    ann = diameter_prove(header, stream)
    i = next(i for i, t in enumerate(ann) if t.tag == "POW-ZERO-CELL")
    a, b = ann[i].args
    ann[i] = T("POW-ZERO-CELL", b, a) if a != b else T("POW-ZERO-CELL", a, b % 4 + 1)
    assert isinstance(run("diameter", header, stream, annotation=ann)[0], Bottom)


def test_understated_diameter_rejected():
    header, stream = graph_stream("graph", 5, [(1, 2), (2, 3), (3, 4), (4, 5)])
    ann = diameter_prove(header, stream)
    assert ann[0] == T("CLAIM", 4)
    ann[0] = T("CLAIM", 3)
    assert isinstance(run("diameter", header, stream, annotation=ann)[0], Bottom)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10 ** 6))
def test_matches_bfs_oracle(n, seed):
    rng = random.Random(seed)
    edges = connected_graph(rng, n, rng.randint(n - 1, 2 * n), simple=False)
    want = max(max(d for d in bfs_distances(n, edges, s)[1:]) for s in range(1, n + 1))
    assert run_graph("diameter", "graph", n, edges, seed=seed)[0] == Value(want)
