import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from annostream import Bottom, Value
from annostream.graphs import graph_stream
from annostream.lp import LPInstance, lp_annotation, lp_prove, random_lp, simplex
from annostream.oracles import lp_optimum, max_flow, min_cut
from annostream.stream import T
from annostream.tum import reduce

from conftest import run, run_graph


def lp(nb, nc, A, b, c):
    return LPInstance(nb, nc, {k: Fraction(v) for k, v in A.items()},
                      {k: Fraction(v) for k, v in b.items()}, {k: Fraction(v) for k, v in c.items()})


def verify_lp(inst, ann=None, seed=0):
    header, stream = inst.to_stream()
    return run("lp", header, stream, seed=seed, annotation=ann)[0]


def test_one_variable_example():
    inst = lp(1, 1, {(1, 1): -1}, {1: -2}, {1: 3})
    opt, x, y = simplex(inst)
    assert opt == 6 and x[1] == 2 and y[1] == -3
    assert verify_lp(inst) == Value(6)


def test_zero_objective():
    inst = lp(2, 1, {(1, 1): 1, (2, 1): -1}, {1: 4, 2: 0}, {})
    assert verify_lp(inst) == Value(0)


def test_diagonal_example():
    inst = lp(2, 2, {(1, 1): 1, (2, 2): 1}, {1: 1, 2: 1}, {1: -1, 2: -1})
    assert verify_lp(inst) == Value(-2)


def test_positive_gap_rejected():
    # x = 3 is feasible but suboptimal; y = -3 is dual feasible
    inst = lp(1, 1, {(1, 1): -1}, {1: -2}, {1: 3})
    ann = lp_annotation(inst, {1: Fraction(3)}, {1: Fraction(-3)})
    assert isinstance(verify_lp(inst, ann), Bottom)


def test_perturbed_entry_rejected():
    inst = lp(2, 2, {(1, 1): 1, (2, 2): 1}, {1: 1, 2: 1}, {1: -1, 2: -1})
    ann = lp_prove(inst)
    i = next(i for i, t in enumerate(ann) if t.tag == "LP-ENTRY")
    t = ann[i]
    ann[i] = type(t)(t.tag, (t.args[0], t.args[1] + 1, *t.args[2:]))
    assert isinstance(verify_lp(inst, ann), Bottom)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 10 ** 6))
def test_random_lps_match_vertex_oracle(nb, nc, seed):
    inst = random_lp(random.Random(seed), nb, nc)
    want = lp_optimum(inst.nb, inst.nc, inst.A, inst.b, inst.c)
    assert verify_lp(inst, seed=seed) == Value(want)


def test_shortest_path_example():
    out, _ = run_graph("spath", "wdigraph", 3, [(1, 2, 2), (2, 3, 3)], s=1, t=3, wmax=10)
    assert out == Value(5)


def test_single_edge_maxflow():
    assert run_graph("maxflow", "wdigraph", 2, [(1, 2, 7)], s=1, t=2, wmax=10)[0] == Value(7)
    assert run_graph("mincut", "wdigraph", 2, [(1, 2, 7)], s=1, t=2, wmax=10)[0] == Value(7)


def test_mwbpm_two_by_two():
    edges = [(1, 3, 1), (1, 4, 2), (2, 3, 2), (2, 4, 1)]
    assert run_graph("mwbpm", "wgraph", 4, edges, nl=2, wmax=10)[0] == Value(2)


def test_mwbpm_rejects_unequal_sides():
    header, stream = graph_stream("wgraph", 3, [(1, 2, 1), (1, 3, 1)], nl=1, wmax=10)
    assert isinstance(run("mwbpm", header, stream, annotation=[T("CLAIM", 1)])[0], Bottom)


def test_reduction_is_local():
    header, stream = graph_stream("wdigraph", 3, [(1, 2, 2), (2, 3, 3)], s=1, t=3, wmax=10)
    inst = reduce("spath", header, stream)
    assert lp_optimum(inst.nb, inst.nc, inst.A, inst.b, inst.c) == 5


def test_maxflow_equals_mincut():
    rng = random.Random(12)
    from annostream import REGISTRY
    for i in range(50):
        header, stream = REGISTRY["maxflow"].gen(rng, rng.randint(2, 10))
        f, _ = run("maxflow", header, stream, seed=i)
        c, _ = run("mincut", header, stream, seed=i)
        edges = [t.args for t in stream]
        assert f == c == Value(max_flow(header.n, edges, header.s, header.t))
        if header.n <= 10:
            assert c.value == min_cut(header.n, edges, header.s, header.t)
