import random

from hypothesis import given, settings
from hypothesis import strategies as st

from annostream import Accept, Bottom, Context, Value
from annostream.dag import dag_prove, find_cycle, topo_ranks
from annostream.field import Fingerprint
from annostream.graphs import graph_stream
from annostream.labels import edge_item, labels_prove, labels_verify
from annostream.oracles import is_acyclic
from annostream.stream import T

from conftest import run, run_graph


def _fp_edges(ctx, n, edges):
    fp = ctx.fingerprint(n * n)
    for u, v in edges:
        fp.update(edge_item(u, v, n))
    return fp


def test_path_labels_shape():
    ann = labels_prove([(1, 2), (2, 3)], {1: 0, 2: 1, 3: 2})
    assert [t.tag for t in ann] == ["NODE-ROW"] * 3 + ["EDGE-ROW"] * 2


def test_self_loop_degree_two():
    ann = labels_prove([(1, 1)], {1: 4})
    assert ann == [T("NODE-ROW", 1, 4, 2), T("EDGE-ROW", 1, 1, 4, 4)]


def test_empty_graph_annotation():
    assert labels_prove([], {}) == []


def test_labels_verify_accepts_honest():
    edges = [(1, 2), (2, 3), (1, 3)]
    ctx = Context(5)
    ann = labels_prove(edges, {1: 3, 2: 1, 3: 2})
    assert labels_verify(_fp_edges(ctx, 3, edges), ann, ctx, 3, 3) == Accept()


def test_inconsistent_edge_label_rejected():
    edges = [(1, 2), (2, 3)]
    ann = labels_prove(edges, {1: 0, 2: 1, 3: 2})
    ann[3] = T("EDGE-ROW", 1, 2, 1, 1)
    out, _ = run("labels", *graph_stream("graph", 3, edges), annotation=ann)
    assert isinstance(out, Bottom)


def test_omitted_edge_rejected():
    header, stream = graph_stream("graph", 3, [(1, 2), (2, 3)])
    ann = labels_prove([(1, 2)], {1: 0, 2: 1, 3: 2})
    out, _ = run("labels", header, stream, annotation=ann)
    assert isinstance(out, Bottom)


def test_topo_and_cycle_examples():
    ranks = topo_ranks(3, [(1, 2), (2, 3)])
    assert ranks[1] < ranks[2] < ranks[3]
    cyc = find_cycle(3, [(1, 2), (2, 3), (3, 1)])
    assert len(cyc) == 3 and set(cyc) == {(1, 2), (2, 3), (3, 1)}
    assert topo_ranks(3, []) is not None


def test_dag_verdicts():
    assert run_graph("dag", "digraph", 3, [(1, 2), (2, 3)])[0] == Value(1)
    assert run_graph("dag", "digraph", 3, [(1, 2), (2, 3), (3, 1)])[0] == Value(0)
    assert run_graph("dag", "digraph", 1, [(1, 1)])[0] == Value(0)


def test_cycle_claim_with_foreign_edge_rejected():
    header, stream = graph_stream("digraph", 3, [(1, 2), (2, 3)])
    _, ann = dag_prove(3, [(1, 2), (2, 3), (3, 1)])
    out, _ = run("dag", header, stream, annotation=ann)
    assert isinstance(out, Bottom)


def test_duplicate_ranks_rejected():
    header, stream = graph_stream("digraph", 3, [(1, 2)])
    _, ann = dag_prove(3, [(1, 2)])
    assert ann[4] == T("NODE-ROW", 3, 3, 0)
    ann[4] = T("NODE-ROW", 3, 2, 0)
    out, _ = run("dag", header, stream, annotation=ann)
    assert isinstance(out, Bottom)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 6), st.data())
def test_dag_matches_brute_force(n, data):
    edges = data.draw(st.lists(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=10))
    is_dag, _ = dag_prove(n, edges)
    assert is_dag == is_acyclic(n, edges)
    assert run_graph("dag", "digraph", n, edges)[0] == Value(int(is_acyclic(n, edges)))


def test_dag_vcost_constant_in_m():
    rng = random.Random(0)
    from annostream.graphs import random_dag
    costs = {run_graph("dag", "digraph", m // 4, random_dag(rng, m // 4, m))[1].vcost
             for m in (64, 256, 1024)}
    assert len(costs) == 1
