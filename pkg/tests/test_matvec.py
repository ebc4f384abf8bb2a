import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annostream import Accept, Bottom, Value
from annostream.field import F61
from annostream.graphs import graph_stream
from annostream.matvec import (_chi_table, eigen_prove, grid_cell, grid_dims, matvec_tokens,
                               random_integer_lp, random_matrix_stream)
from annostream.lp import LPInstance
from annostream.oracles import effective_resistance, matvec
from annostream.stream import StreamHeader, T

from conftest import run

HALF = Fraction(1, 2)


def mv(b, c, entries, xs, alpha=HALF, seed=0, shuffle=None):
    toks = [T("M", i, j, v) for i, j, v in entries] + [T("x", j, v) for j, v in xs]
    if shuffle is not None:
        random.Random(shuffle).shuffle(toks)
    header = StreamHeader("matrix", {"b": b, "c": c, "alpha": alpha, "m": len(toks)})
    return run("matvec", header, toks, seed=seed)[0]


def test_identity():
    assert mv(2, 2, [(1, 1, 1), (2, 2, 1)], [(1, 4), (2, 9)]) == Value((4, 9))


def test_two_by_two():
    assert mv(2, 2, [(1, 1, 1), (1, 2, 2), (2, 1, 3), (2, 2, 4)], [(1, 1), (2, 1)]) == Value((3, 7))


def test_zero_matrix():
    assert mv(3, 2, [], [(1, 5), (2, -1)]) == Value((0, 0, 0))


def test_shuffled_stream_same_value():
    rng = random.Random(1)
    entries = [(rng.randint(1, 6), rng.randint(1, 9), rng.randint(-9, 9)) for _ in range(30)]
    xs = [(j, rng.randint(-9, 9)) for j in range(1, 10)]
    outs = {mv(6, 9, entries, xs, shuffle=s) for s in range(5)}
    assert len(outs) == 1


@pytest.mark.parametrize("c,alpha,h", [(4096, 0, 1), (4096, Fraction(1, 4), 8),
                                       (4096, HALF, 64), (4096, Fraction(3, 4), 512),
                                       (10, HALF, 4), (1, 1, 1), (7, 1, 7)])
def test_grid_dims(c, alpha, h):
    hh, v = grid_dims(c, alpha)
    assert hh == h and hh * v >= c and hh * (v - 1) < c


def test_grid_cells_cover_columns():
    h, v = grid_dims(37, HALF)
    cells = {grid_cell(j, v) for j in range(1, 38)}
    assert len(cells) == 37 and all(1 <= a <= h and 1 <= b <= v for a, b in cells)


def test_chi_table_is_lagrange_basis():
    p = 101
    chi = _chi_table(4, 9, p)
    # interpolating k^2 at the nodes 1..4 reproduces z^2 everywhere
    for z in range(1, 10):
        assert sum(chi[x][z] * x * x for x in range(1, 5)) % p == z * z % p


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 64), st.integers(1, 64), st.sampled_from([0, Fraction(1, 4), HALF, 1]),
       st.integers(0, 10 ** 6))
def test_random_products_match_oracle(b, c, alpha, seed):
    rng = random.Random(seed)
    header, stream = random_matrix_stream(rng, b, c, alpha, rng.randint(0, 3 * b))
    entries = [t.args for t in stream if t.tag == "M"]
    xs = [t.args for t in stream if t.tag == "x"]
    assert run("matvec", header, stream, seed=seed)[0] == Value(tuple(matvec(b, c, entries, xs)))


def test_perturbed_eval_rejected():
    rng = random.Random(3)
    header, stream = random_matrix_stream(rng, 8, 8, HALF, 20)
    from annostream import REGISTRY
    ann = REGISTRY["matvec"].prove(header, stream)
    bad = 0
    for seed in range(50):
        i = random.Random(seed).choice([k for k, t in enumerate(ann) if t.tag == "MV-EVAL"])
        forged = list(ann)
        forged[i] = T("MV-EVAL", (ann[i].args[0] + 1) % F61.p)
        bad += isinstance(run("matvec", header, stream, seed=seed, annotation=forged)[0], Bottom)
    assert bad == 50


def test_vcost_tracks_grid():
    rng = random.Random(0)
    costs = {}
    for a in (0, HALF):
        header, stream = random_matrix_stream(rng, 256, 256, a, 256)
        costs[a] = run("matvec", header, stream, meter=64)[1].vcost
    assert costs[0] > 10 * costs[HALF]


# --- eigenpairs ---------------------------------------------------------------

def eig_header(n, lam, toks, **kw):
    return StreamHeader("matrix", {"n": n, "b": n, "c": n, "lam": lam, "alpha": HALF,
                                   "m": len(toks), **kw})


def test_diagonal_eigenpair():
    toks = [T("M", 1, 1, 2), T("M", 2, 2, 3)]
    header = eig_header(2, 3, toks)
    ann = eigen_prove(header, toks)
    assert ann[:2] == [T("EIG-X", 1, 0), T("EIG-X", 2, 1)]
    assert run("eigen", header, toks)[0] == Accept()


def test_non_eigenvalue_rejected():
    toks = [T("M", 1, 1, 2), T("M", 2, 2, 3)]
    header = eig_header(2, 1, toks)
    with pytest.raises(ValueError):
        eigen_prove(header, toks)
    forged = eigen_prove(eig_header(2, 2, toks), toks)
    assert isinstance(run("eigen", header, toks, annotation=forged)[0], Bottom)


def test_zero_vector_rejected():
    toks = [T("M", 1, 1, 2), T("M", 2, 2, 3)]
    header = eig_header(2, 3, toks)
    ann = [T("EIG-X", 1, 0), T("EIG-X", 2, 0)]
    ann += matvec_tokens(2, 2, HALF, [a.args for a in toks], {1: 0, 2: 0}, F61.p)
    out = run("eigen", header, toks, annotation=ann)[0]
    assert out == Bottom("degenerate", "x = 0")


def test_laplacian_of_edge():
    toks = [T("e", 1, 2)]
    header = eig_header(2, 2, toks, mode="lap")
    assert run("eigen", header, toks)[0] == Accept()



def test_any_eigenspace_vector_is_accepted():
    # two components: (1,1,2,2) is as good a null vector as the prover's
    from annostream import REGISTRY
    from annostream.matvec import _entries_from_stream
    toks = [T("e", 1, 2), T("e", 3, 4)]
    header = eig_header(4, 0, toks, mode="lap")
    x = {1: 1, 2: 1, 3: 2, 4: 2}
    ann = [T("EIG-X", j, x[j]) for j in range(1, 5)]
    ann += matvec_tokens(4, 4, header.get("alpha", Fraction(1, 2)),
                         _entries_from_stream(header, toks), x, F61.p)
    assert run("eigen", header, toks, annotation=ann)[0] == Accept()
    assert not REGISTRY["eigen"].canonical

# --- effective resistance ---------------------------------------------------------

@pytest.mark.parametrize("n,edges,want", [
    (2, [(1, 2, 1)], Fraction(1)),
    (2, [(1, 2, 1), (1, 2, 1)], Fraction(1, 2)),
    (3, [(1, 2, 1), (2, 3, 1)], Fraction(2)),
])
def test_resistance_laws(n, edges, want):
    s, t = 1, n
    out = run("resistance", *graph_stream("wgraph", n, edges, s=s, t=t, alpha=HALF))[0]
    assert out == Value(want) and effective_resistance(n, edges, s, t) == want


# --- lp tradeoff ------------------------------------------------------------------

def test_lptrade_one_variable():
    inst = LPInstance(1, 1, {(1, 1): -1}, {1: -2}, {1: 3})
    header, stream = inst.to_stream()
    header.params["alpha"] = HALF
    assert run("lptrade", header, stream)[0] == Value(6)


@pytest.mark.parametrize("alpha", [0, HALF, 1])
def test_lptrade_random(alpha):
    rng = random.Random(4)
    from annostream.oracles import lp_optimum
    for _ in range(10):
        inst = random_integer_lp(rng, 6, 4)
        header, stream = inst.to_stream()
        header.params["alpha"] = alpha
        want = lp_optimum(inst.nb, inst.nc, inst.A, inst.b, inst.c)
        assert run("lptrade", header, stream)[0] == Value(want)
