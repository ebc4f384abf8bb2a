import random

from hypothesis import given, settings
from hypothesis import strategies as st

from annostream import Accept, Bottom, Value
from annostream.graphs import bfs_distances, connected_graph, graph_stream
from annostream.oracles import is_bipartite
from annostream.stream import T
from annostream.traversal import bfs_labels, bfs_prove, dfs_prove, dfs_run

from conftest import run, run_graph


def test_path_levels_and_dfs_rows():
    edges = [(1, 2), (2, 3)]
    _, dist = bfs_labels(3, edges, roots=[1])
    assert [dist[v] for v in (1, 2, 3)] == [0, 1, 2]
    assert dfs_run(3, edges, 1) == [("push", 1), ("edge", 1, 2), ("push", 2), ("edge", 2, 3),
                                   ("push", 3), ("pop", 3), ("pop", 2), ("pop", 1)]


def test_triangle_has_one_intra_level_edge():
    edges = [(1, 2), (2, 3), (1, 3)]
    ann = bfs_prove(3, edges, 1)
    flat = [t for t in ann if t.tag == "BFS-EDGE" and t.args[3] == t.args[4]]
    assert len(flat) == 1 and flat[0].args[3] == 1


def test_star_from_center():
    edges = [(1, 2), (1, 3), (1, 4)]
    _, dist = bfs_labels(4, edges, roots=[1])
    assert all(dist[v] == 1 for v in (2, 3, 4))
    assert run_graph("dfs", "graph", 4, edges, s=1)[0] == Accept()


def test_bfs_accepts_honest_and_labels_are_distances():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(1, 30)
        edges = connected_graph(rng, n, rng.randint(n, 3 * n), simple=False)
        s = rng.randint(1, n)
        ann = bfs_prove(n, edges, s)
        assert run("bfs", *graph_stream("graph", n, edges, s=s), annotation=ann)[0] == Accept()
        truth = bfs_distances(n, edges, s)
        assert all(truth[t.args[0]] == t.args[2] for t in ann if t.tag == "BFS-NODE")


def test_shifted_level_rejected():
    edges = [(1, 2), (2, 3), (3, 4)]
    header, stream = graph_stream("graph", 4, edges, s=1)
    ann = bfs_prove(4, edges, 1)
    i = next(i for i, t in enumerate(ann) if t.tag == "BFS-NODE" and t.args[0] == 3)
    v, r, lev, d = ann[i].args
    ann[i] = T("BFS-NODE", v, r, lev + 1, d)
    assert isinstance(run("bfs", header, stream, annotation=ann)[0], Bottom)


def test_reordered_levels_rejected():
    edges = [(1, 2), (2, 3), (3, 4)]
    header, stream = graph_stream("graph", 4, edges, s=1)
    ann = bfs_prove(4, edges, 1)
    lv = [i for i, t in enumerate(ann) if t.tag == "BFS-LEVEL"]
    a, b = lv[0], lv[-1]
    ann[a], ann[b] = ann[b], ann[a]
    assert isinstance(run("bfs", header, stream, annotation=ann)[0], Bottom)


def test_bipartite_examples():
    assert run_graph("bipartite", "graph", 4, [(1, 2), (2, 3), (3, 4), (4, 1)])[0] == Value(1)
    assert run_graph("bipartite", "graph", 3, [(1, 2), (2, 3), (3, 1)])[0] == Value(0)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 12), st.data())
def test_bipartite_matches_coloring(n, data):
    edges = data.draw(st.lists(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=20))
    assert run_graph("bipartite", "graph", n, edges)[0] == Value(int(is_bipartite(n, edges)))


def test_dfs_edge_off_top_rejected():
    edges = [(1, 2), (2, 3), (1, 4)]
    header, stream = graph_stream("graph", 4, edges, s=1)
    ann = dfs_prove(4, edges, 1)
    i = next(i for i, t in enumerate(ann) if t.tag == "DFS-EDGE" and t.args[:2] == (2, 3))
    j = next(i for i, t in enumerate(ann) if t.tag == "DFS-EDGE" and t.args[:2] == (1, 4))
    ann[i], ann[j] = ann[j], ann[i]
    assert isinstance(run("dfs", header, stream, annotation=ann)[0], Bottom)


def test_dfs_wrong_new_top_rejected():
    edges = [(1, 2), (2, 3)]
    header, stream = graph_stream("graph", 3, edges, s=1)
    ann = dfs_prove(3, edges, 1)
    i = next(i for i, t in enumerate(ann) if t.tag == "DFS-POP" and t.args[0] == 3)
    v, top, h, t_ = ann[i].args
    ann[i] = T("DFS-POP", v, 1, 1, 8)
    assert isinstance(run("dfs", header, stream, annotation=ann)[0], Bottom)


def replay_dfs(n, edges, s, ann):
    # trusted stack machine: the presented rows must be a legal DFS
    stack, seen, used = [], set(), set()
    for t in ann:
        if t.tag == "DFS-PUSH":
            v = t.args[0]
            assert v not in seen
            seen.add(v)
            stack.append(v)
        elif t.tag == "DFS-EDGE":
            u, v = t.args[:2]
            assert stack and stack[-1] == u
        elif t.tag == "DFS-POP":
            assert stack.pop() == t.args[0]
    assert not stack and seen == set(range(1, n + 1))


def test_dfs_rows_replay_on_stack_machine():
    rng = random.Random(9)
    for _ in range(60):
        n = rng.randint(1, 25)
        edges = connected_graph(rng, n, rng.randint(n, 3 * n), simple=False)
        s = rng.randint(1, n)
        ann = dfs_prove(n, edges, s)
        assert run("dfs", *graph_stream("graph", n, edges, s=s), annotation=ann)[0] == Accept()
        replay_dfs(n, edges, s, ann)
