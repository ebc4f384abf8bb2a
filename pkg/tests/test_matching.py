import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from annostream import Bottom, Value
from annostream.graphs import graph_stream, random_graph
from annostream.matching import matching_prove, max_matching
from annostream.oracles import max_matching_brute, odd_components
from annostream.stream import T

from conftest import run, run_graph

K3 = [(1, 2), (2, 3), (1, 3)]
C4 = [(1, 2), (2, 3), (3, 4), (4, 1)]
STAR = [(1, 2), (1, 3), (1, 4)]


def tutte_berge(n, edges, vs):
    return (len(vs) - odd_components(n, edges, vs) + n) // 2


def test_tutte_berge_examples():
    for n, edges, k, vs in ((3, K3, 1, set()), (4, C4, 2, set()), (4, STAR, 1, {1})):
        pairs, odd = max_matching(n, edges)
        assert len(pairs) == k
        assert tutte_berge(n, edges, vs) == k
        assert tutte_berge(n, edges, odd) == k


def test_verified_examples():
    assert run_graph("matching", "graph", 3, K3)[0] == Value(1)
    assert run_graph("matching", "graph", 4, C4)[0] == Value(2)
    assert run_graph("matching", "graph", 4, STAR)[0] == Value(1)
    assert run_graph("matching", "graph", 1, [])[0] == Value(0)


def test_overstated_claim_rejected():
    header, stream = graph_stream("graph", 4, C4)
    _, ann = matching_prove(4, C4)
    ann[0] = T("CLAIM", 3)
    assert isinstance(run("matching", header, stream, annotation=ann)[0], Bottom)


def test_isolated_pair_is_not_one_component():
    # two isolated nodes must not be presented as a single component
    header, stream = graph_stream("graph", 2, [])
    _, ann = matching_prove(2, [])
    comp = [i for i, t in enumerate(ann) if t.tag == "MATCH-COMP"]
    assert len(comp) == 2
    forged = ann[:comp[0]] + [T("MATCH-COMP", 2)] + [t for t in ann[comp[0] + 1:]
                                                     if t.tag != "MATCH-COMP"]
    assert isinstance(run("matching", header, stream, annotation=forged)[0], Bottom)


def test_gallai_edmonds_set_is_tight_on_small_graphs():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(1, 8)
        edges = random_graph(rng, n, rng.randint(0, 12), simple=False)
        pairs, odd = max_matching(n, edges)
        k = len(pairs)
        assert tutte_berge(n, edges, odd) == k
        for r in range(n + 1):
            for sub in itertools.combinations(range(1, n + 1), r):
                assert tutte_berge(n, edges, set(sub)) >= k


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8), st.data())
def test_matches_brute_force(n, data):
    edges = data.draw(st.lists(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=14))
    out, _ = run_graph("matching", "graph", n, edges, seed=data.draw(st.integers(0, 99)))
    assert out == Value(max_matching_brute(n, edges))
