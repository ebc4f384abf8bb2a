"""Prime-field arithmetic and linear multiset fingerprints.

A fingerprint of a multiset ``M = {i: m(i)}`` over a domain ``[1, q]`` is the
field element ``sum m(i) * alpha**i mod p`` for a secret ``alpha``.  Updates
commute and the map is linear in ``M``, so two parties can hash the same
multiset in any order and compare a single word.

:class:`TupleFingerprint` generalises the construction to tuples whose
encoded domain would not fit below ``p``: each coordinate gets its own secret
point and a tuple contributes ``prod alpha_k ** item_k``.
"""

from __future__ import annotations

import os
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import isprime

MERSENNE61 = (1 << 61) - 1


class FieldError(ValueError):
    """Bad field configuration or an operand outside the declared domain."""


class DomainError(FieldError):
    """Item outside the declared fingerprint domain."""


def default_prime() -> int:
    env = os.environ.get("ANNOSTREAM_FIELD_P")
    return int(env) if env else MERSENNE61


@dataclass(frozen=True)
class PrimeField:
    p: int = MERSENNE61

    def __post_init__(self):
        if not isprime(self.p):
            raise FieldError(f"modulus {self.p} is not prime")
        if self.p.bit_length() > 64:
            raise FieldError("modulus must fit in one 64-bit word")

    def elem(self, x) -> int:
        """Map an int or Fraction into the field."""
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldError(f"denominator of {x} vanishes mod p")
            return x.numerator % self.p * pow(x.denominator, -1, self.p) % self.p
        return x % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, -1, self.p)

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.p)

    def signed(self, a: int) -> int:
        """Representative of ``a`` in ``(-p/2, p/2]``."""
        a %= self.p
        return a - self.p if a > self.p // 2 else a

    def random_element(self, rng: random.Random, low: int = 1) -> int:
        return rng.randrange(low, self.p)


F61 = PrimeField()


class Fingerprint:
    """Linear fingerprint ``sum m(i) alpha^i`` over a domain ``[1, q]``.

    With ``exact=True`` the multiset itself is kept instead of the hash;
    comparisons are then exact.  The exact mode is a test oracle and never
    small-space.
    """

    __slots__ = ("field", "alpha", "q", "acc", "exact")

    def __init__(self, alpha: int, q: int, field: PrimeField = F61, exact: bool = False):
        if q >= field.p:
            raise FieldError(f"domain size q={q} must be below p={field.p}")
        if q < 1:
            raise FieldError("domain size must be positive")
        if alpha % field.p == 0:
            raise FieldError("alpha = 0 maps every multiset to 0")
        self.field = field
        self.alpha = alpha % field.p
        self.q = q
        self.exact = exact
        self.acc = Counter() if exact else 0

    def _check(self, other: "Fingerprint"):
        if (self.alpha, self.field.p, self.q, self.exact) != (
            other.alpha, other.field.p, other.q, other.exact
        ):
            raise FieldError("incompatible fingerprints")

    def update(self, item: int, mult=1) -> "Fingerprint":
        if not 1 <= item <= self.q:
            raise DomainError(f"item {item} outside [1, {self.q}]")
        if isinstance(mult, int) and abs(mult) >= self.field.p:
            raise FieldError("multiplicity must satisfy |mult| < p")
        m = self.field.elem(mult)
        if self.exact:
            self.acc[item] = (self.acc[item] + m) % self.field.p
        elif m:
            self.acc = (self.acc + m * pow(self.alpha, item, self.field.p)) % self.field.p
        return self

    def copy(self) -> "Fingerprint":
        out = Fingerprint(self.alpha, self.q, self.field, self.exact)
        out.acc = Counter(self.acc) if self.exact else self.acc
        return out

    def __add__(self, other: "Fingerprint") -> "Fingerprint":
        self._check(other)
        out = self.copy()
        if self.exact:
            for k, v in other.acc.items():
                out.acc[k] = (out.acc[k] + v) % self.field.p
        else:
            out.acc = (self.acc + other.acc) % self.field.p
        return out

    def scale(self, s: int) -> "Fingerprint":
        out = self.copy()
        s = self.field.elem(s)
        if self.exact:
            out.acc = Counter({k: v * s % self.field.p for k, v in self.acc.items()})
        else:
            out.acc = self.acc * s % self.field.p
        return out

    def value(self) -> int:
        """The hash value; in exact mode it is computed from the multiset."""
        if not self.exact:
            return self.acc
        p = self.field.p
        return sum(v * pow(self.alpha, k, p) for k, v in self.acc.items()) % p

    def __eq__(self, other) -> bool:
        if not isinstance(other, Fingerprint):
            return NotImplemented
        self._check(other)
        if self.exact:
            return +Counter({k: v for k, v in self.acc.items() if v}) == +Counter(
                {k: v for k, v in other.acc.items() if v}
            )
        return self.acc == other.acc

    __hash__ = None

    def __words__(self) -> int:
        # alpha and q are shared protocol constants; only the accumulator is state
        return 1

    def __repr__(self):
        return f"Fingerprint(q={self.q}, acc={self.acc!r})"


class TupleFingerprint:
    """Fingerprint of a multiset of integer tuples.

    Coordinate ``k`` ranges over ``[0, bounds[k]]`` and has its own secret
    point; an item contributes ``mult * prod alphas[k] ** item[k]``.  Two
    distinct multisets collide with probability at most ``sum(bounds) / p``.
    """

    __slots__ = ("field", "alphas", "bounds", "acc", "exact")

    def __init__(self, alphas: Sequence[int], bounds: Sequence[int],
                 field: PrimeField = F61, exact: bool = False):
        if len(alphas) != len(bounds):
            raise FieldError("one secret point per coordinate")
        if any(a % field.p == 0 for a in alphas):
            raise FieldError("alpha = 0 is degenerate")
        if sum(bounds) >= field.p:
            raise FieldError("total degree must stay below p")
        self.field = field
        self.alphas = tuple(a % field.p for a in alphas)
        self.bounds = tuple(bounds)
        self.exact = exact
        self.acc = Counter() if exact else 0

    def _term(self, item: Sequence[int]) -> int:
        if len(item) != len(self.bounds):
            raise DomainError(f"tuple {item} has wrong arity")
        p = self.field.p
        t = 1
        for a, x, b in zip(self.alphas, item, self.bounds):
            if not 0 <= x <= b:
                raise DomainError(f"coordinate {x} outside [0, {b}]")
            t = t * pow(a, x, p) % p
        return t

    def update(self, item: Sequence[int], mult=1) -> "TupleFingerprint":
        m = self.field.elem(mult)
        if self.exact:
            self._term(item)  # domain check only
            key = tuple(item)
            self.acc[key] = (self.acc[key] + m) % self.field.p
        elif m:
            self.acc = (self.acc + m * self._term(item)) % self.field.p
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, TupleFingerprint):
            return NotImplemented
        if (self.alphas, self.bounds, self.exact) != (other.alphas, other.bounds, other.exact):
            raise FieldError("incompatible fingerprints")
        if self.exact:
            return {k: v for k, v in self.acc.items() if v} == {
                k: v for k, v in other.acc.items() if v}
        return self.acc == other.acc

    __hash__ = None

    def __words__(self) -> int:
        return 1


class PairFingerprint:
    """Fingerprint of a multiset of ``(key, value)`` pairs with field values.

    Each pair maps to ``z = value + gamma * key`` and contributes
    ``mult / (beta - z)``.  Distinct multisets of ``z`` give distinct
    rational functions of ``beta``, so two multisets of total size ``N``
    collide with probability about ``N / p`` plus ``N**2 / p`` for a
    collision among the ``z`` themselves.  Values can be any field images,
    which makes it the tool for checking that rationals are quoted
    consistently.
    """

    __slots__ = ("field", "beta", "gamma", "acc", "exact")

    def __init__(self, beta: int, gamma: int, field: PrimeField = F61, exact: bool = False):
        if gamma % field.p == 0:
            raise FieldError("gamma = 0 ignores the key")
        self.field = field
        self.beta = beta % field.p
        self.gamma = gamma % field.p
        self.exact = exact
        self.acc = Counter() if exact else 0

    def update(self, key: int, value, mult=1) -> "PairFingerprint":
        f = self.field
        m = f.elem(mult)
        if self.exact:
            k = (key, Fraction(value))
            self.acc[k] = (self.acc[k] + m) % f.p
        elif m:
            z = (f.elem(value) + self.gamma * key) % f.p
            self.acc = (self.acc + m * f.inv(self.beta - z)) % f.p
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairFingerprint):
            return NotImplemented
        if (self.beta, self.gamma, self.exact) != (other.beta, other.gamma, other.exact):
            raise FieldError("incompatible fingerprints")
        if self.exact:
            return {k: v for k, v in self.acc.items() if v} == {
                k: v for k, v in other.acc.items() if v}
        return self.acc == other.acc

    __hash__ = None

    def __words__(self) -> int:
        return 1


def rational_bound(field: PrimeField = F61) -> int:
    """Largest ``B`` such that rationals with ``|num|, den <= B`` have
    distinct images in the field."""
    from math import isqrt
    return isqrt((field.p - 1) // 2)


# Functional surface mirroring the operation names used throughout the docs.

def fp_new(alpha: int, q: int, field: PrimeField = F61, exact: bool = False) -> Fingerprint:
    return Fingerprint(alpha, q, field, exact)


def fp_update(fp: Fingerprint, item: int, mult=1) -> Fingerprint:
    return fp.update(item, mult)


def fp_add(a: Fingerprint, b: Fingerprint) -> Fingerprint:
    return a + b


def fp_scale(a: Fingerprint, s: int) -> Fingerprint:
    return a.scale(s)


def fingerprint_of(items: Iterable[int], alpha: int, q: int,
                   field: PrimeField = F61) -> Fingerprint:
    fp = Fingerprint(alpha, q, field)
    for it in items:
        fp.update(it)
    return fp


def range_fingerprint(fp: Fingerprint, lo: int, hi: int) -> Fingerprint:
    """Fold the set ``{lo, ..., hi}`` into ``fp`` in O(1) words.

    Uses the geometric series in hash mode so time is O(log hi).
    """
    if hi < lo:
        return fp
    if fp.exact or fp.alpha == 1:
        for i in range(lo, hi + 1):
            fp.update(i)
        return fp
    if not (1 <= lo and hi <= fp.q):
        raise DomainError(f"range [{lo}, {hi}] outside [1, {fp.q}]")
    p, a = fp.field.p, fp.alpha
    geo = (pow(a, hi + 1, p) - pow(a, lo, p)) * pow(a - 1, -1, p) % p
    fp.acc = (fp.acc + geo) % p
    return fp


# Domain encoders ---------------------------------------------------------

NODE, EDGE, WEIGHTED_EDGE, INDEXED = "node", "edge-pair", "weighted-edge-triple", "indexed-tuple"


@dataclass(frozen=True)
class DomainEncoder:
    """Injective map from bounded objects onto ``[1, q]``.

    ``dims`` are the per-component upper bounds: ``(n,)`` for nodes,
    ``(n, n)`` for ordered pairs, ``(n, n, wmax)`` for weighted edges, any
    tuple for mixed-radix indexed tuples.  Every component is 1-based.
    """

    kind: str
    dims: tuple

    @property
    def q(self) -> int:
        q = 1
        for d in self.dims:
            q *= d
        return q

    def encode(self, obj) -> int:
        comps = (obj,) if isinstance(obj, int) else tuple(obj)
        if len(comps) != len(self.dims):
            raise DomainError(f"{obj!r} does not match encoder arity {len(self.dims)}")
        idx = 0
        for c, d in zip(comps, self.dims):
            if not 1 <= c <= d:
                raise DomainError(f"component {c} outside [1, {d}]")
            idx = idx * d + (c - 1)
        return idx + 1


def node_encoder(n: int) -> DomainEncoder:
    return DomainEncoder(NODE, (n,))


def edge_encoder(n: int) -> DomainEncoder:
    return DomainEncoder(EDGE, (n, n))


def weighted_edge_encoder(n: int, wmax: int) -> DomainEncoder:
    return DomainEncoder(WEIGHTED_EDGE, (n, n, wmax))


def encode(enc: DomainEncoder, obj) -> int:
    return enc.encode(obj)
