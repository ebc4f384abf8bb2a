import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annostream.field import (F61, DomainError, FieldError, Fingerprint, PrimeField,
                              TupleFingerprint, edge_encoder, encode, fingerprint_of, fp_add,
                              fp_new, fp_scale, fp_update, node_encoder, rational_bound,
                              weighted_edge_encoder)

P97 = PrimeField(97)


def poly(items, alpha, p):
    # independent oracle: evaluate sum m(i) alpha^i with big integers, reduce once
    return sum(m * alpha ** i for i, m in items) % p


def test_worked_example_p97():
    fp = fp_update(fp_new(5, 10, P97), 3, 2)
    assert fp.value() == 56 == poly([(3, 2)], 5, 97)


def test_empty_and_zero_multiplicity():
    fp = fp_new(5, 10, P97)
    assert fp.value() == 0
    fp_update(fp, 4, 0)
    assert fp.value() == 0


def test_alpha_zero_rejected():
    with pytest.raises(FieldError):
        fp_new(0, 10, P97)
    with pytest.raises(FieldError):
        fp_new(97, 10, P97)


def test_item_outside_domain():
    fp = fp_new(5, 10, P97)
    for bad in (0, 11, -1):
        with pytest.raises(DomainError):
            fp.update(bad)


def test_nonprime_modulus_rejected():
    with pytest.raises(FieldError):
        PrimeField(91)


def test_linearity_examples():
    a = fingerprint_of([1], 7, 10, P97)
    b = fingerprint_of([2], 7, 10, P97)
    assert fp_add(a, b) == fingerprint_of([1, 2], 7, 10, P97)
    assert fp_scale(fingerprint_of([3, 3], 7, 10, P97), 0).value() == 0
    assert fp_scale(fingerprint_of([1], 7, 10, P97), 3) == fp_update(fp_new(7, 10, P97), 1, 3)


def test_mismatched_fingerprints_do_not_combine():
    with pytest.raises(FieldError):
        fp_add(fp_new(5, 10, P97), fp_new(6, 10, P97))


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(1, 1000), st.integers(-5, 5)), max_size=40),
       st.randoms(use_true_random=False))
def test_permutation_invariance(updates, rnd):
    alpha = 123456789
    a = Fingerprint(alpha, 1000)
    for item, mult in updates:
        a.update(item, mult)
    shuffled = list(updates)
    rnd.shuffle(shuffled)
    b = Fingerprint(alpha, 1000)
    for item, mult in shuffled:
        b.update(item, mult)
    assert a == b
    assert a.value() == poly(updates, alpha, F61.p)


@settings(max_examples=100)
@given(st.lists(st.integers(1, 50), max_size=20), st.lists(st.integers(1, 50), max_size=20),
       st.integers(0, 10))
def test_linearity_property(xs, ys, s):
    alpha = 987654321
    fa, fb = fingerprint_of(xs, alpha, 50), fingerprint_of(ys, alpha, 50)
    assert (fa + fb).value() == fingerprint_of(xs + ys, alpha, 50).value()
    assert fa.scale(s).value() == s * fa.value() % F61.p


def test_exact_mode_compares_multisets():
    a = Fingerprint(5, 10, exact=True).update(1).update(2)
    b = Fingerprint(5, 10, exact=True).update(2).update(1)
    c = Fingerprint(5, 10, exact=True).update(3)
    assert a == b and a != c


def test_encoders():
    assert encode(edge_encoder(4), (1, 1)) == 1
    assert encode(edge_encoder(4), (2, 3)) == 7
    assert encode(weighted_edge_encoder(4, 8), (1, 2, 5)) == 13
    assert {encode(edge_encoder(4), (u, v)) for u in range(1, 5) for v in range(1, 5)} \
        == set(range(1, 17))
    assert encode(node_encoder(5), 5) == 5
    with pytest.raises(DomainError):
        encode(edge_encoder(4), (0, 2))


def test_weighted_encoder_is_bijective():
    enc = weighted_edge_encoder(3, 4)
    codes = [enc.encode((u, v, w)) for u in range(1, 4) for v in range(1, 4) for w in range(1, 5)]
    assert sorted(codes) == list(range(1, enc.q + 1))


def test_tuple_fingerprint_order_free():
    rng = random.Random(3)
    items = [(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(30)]
    a = TupleFingerprint([11, 13], [9, 9])
    b = TupleFingerprint([11, 13], [9, 9])
    for it in items:
        a.update(it)
    for it in reversed(items):
        b.update(it)
    assert a == b


def test_rational_bound_separates_small_rationals():
    B = rational_bound(P97)
    seen = {}
    from fractions import Fraction
    for num in range(-B, B + 1):
        for den in range(1, B + 1):
            v = Fraction(num, den)
            seen.setdefault(P97.elem(v), set()).add(v)
    assert all(len(vs) == 1 for vs in seen.values())


def test_collisions_small_sample():
    # the full 10^6-trial experiment lives in the acceptance suite
    rng = random.Random(0)
    hits = 0
    for _ in range(2000):
        alpha = F61.random_element(rng)
        x, y = rng.sample(range(1, 10 ** 6 + 1), 2)
        hits += pow(alpha, x, F61.p) == pow(alpha, y, F61.p)
    assert hits == 0
