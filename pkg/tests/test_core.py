import random

import pytest

from annostream import REGISTRY, Bottom, Value, attack, run_protocol
from annostream.core import MUTATION_KINDS, Context, state_words
from annostream.graphs import graph_stream
from annostream.stream import T

from conftest import run


def test_every_protocol_registered():
    assert set(REGISTRY) == {
        "labels", "dag", "bfs", "bipartite", "dfs", "matching", "lp", "spath", "maxflow",
        "mincut", "mwbpm", "matvec", "lptrade", "eigen", "resistance", "diameter", "memcheck",
        "mst", "sssp", "apsp"}


def test_dag_two_edges():
    out, cost = run("dag", *graph_stream("digraph", 3, [(1, 2), (2, 3)]))
    assert out == Value(1)
    assert 0 < cost.hcost <= 20 * 2


def test_empty_annotation_is_bottom():
    header, stream = graph_stream("digraph", 3, [(1, 2), (2, 3)])
    out, _ = run("dag", header, stream, annotation=[])
    assert isinstance(out, Bottom)


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_same_seed_same_report(name):
    proto = REGISTRY[name]
    header, stream = proto.gen(random.Random(4), 6)
    ann = proto.prove(header, stream)
    a = run_protocol(proto.verifier, header, stream, ann, 11)
    b = run_protocol(proto.verifier, header, stream, ann, 11)
    assert a == b


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_strided_metering_matches_full(name):
    proto = REGISTRY[name]
    header, stream = proto.gen(random.Random(8), 8)
    ann = proto.prove(header, stream)
    full = run_protocol(proto.verifier, header, stream, ann, 3)
    for stride in (2, 7):
        strided = run_protocol(proto.verifier, header, stream, ann, 3, meter=stride)
        assert strided[0] == full[0]
        assert strided[1].hcost == full[1].hcost
        assert strided[1].vcost <= full[1].vcost


def test_strided_metering_exact_for_matvec():
    proto = REGISTRY["matvec"]
    header, stream = proto.gen(random.Random(2), 12)
    ann = proto.prove(header, stream)
    assert run_protocol(proto.verifier, header, stream, ann, 0)[1] == \
        run_protocol(proto.verifier, header, stream, ann, 0, meter=64)[1]


def test_attack_identity_list_is_empty():
    proto = REGISTRY["matching"]
    header, stream = graph_stream("graph", 4, [(1, 2), (3, 4), (2, 3)])
    assert attack(proto, header, stream, proto.prove(header, stream), [], 10) == {}


def test_matching_attacks_all_rejected():
    proto = REGISTRY["matching"]
    header, stream = proto.gen(random.Random(1), 10)
    table = attack(proto, header, stream, proto.prove(header, stream),
                   ["perturb-value", "wrong-answer"], 100, seed=3)
    for rej, runs in table.values():
        assert runs > 0 and rej == runs


def test_state_words_counts_containers():
    assert state_words(5) == 1
    assert state_words([1, 2, 3]) == 3
    assert state_words({"a": 1}) == 1
    assert state_words(Context(0)) >= 1


def test_mutation_kinds():
    assert MUTATION_KINDS == ("drop-token", "duplicate-token", "perturb-value",
                              "swap-adjacent", "relabel", "wrong-answer")


def test_unknown_tag_rejected():
    header, stream = graph_stream("digraph", 2, [(1, 2)])
    out, _ = run("dag", header, stream, annotation=[T("BOGUS", 1)])
    assert isinstance(out, Bottom)
