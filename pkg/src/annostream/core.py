"""Protocol contract, cost accounting and the adversarial mutation harness.

A verifier is a small object fed one token at a time: first every stream
token, then every annotation token, then ``finish``.  It never sees a token
twice.  Rejections are raised as :class:`Reject` and surface as
:class:`Bottom` outcomes with a machine-readable reason.

Verifier working memory (vcost) is measured by walking the verifier's public
attributes after every token and counting machine words: one per integer or
field element, two per rational, one per fingerprint accumulator.  The token
currently being parsed and the emitted output stream are not state.
"""

from __future__ import annotations

import random
import types
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, ClassVar, Iterable, Optional

from .field import (F61, FieldError, Fingerprint, PairFingerprint, PrimeField, TupleFingerprint,
                    default_prime)
from .stream import ParseError, StreamHeader, StructureError, Token, token_words


class Reject(Exception):
    """Raised inside a verifier to output bottom."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass(frozen=True)
class Value:
    value: object


@dataclass(frozen=True)
class Accept:
    pass


@dataclass(frozen=True)
class Bottom:
    reason: str
    detail: str = field(default="", compare=False)


Outcome = Value | Accept | Bottom


@dataclass(frozen=True)
class CostReport:
    hcost: int
    vcost: int
    stream_len: int
    annotation_tokens: int


def state_words(obj) -> int:
    """Machine words held by ``obj``, recursing into containers and objects."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return 1
    if isinstance(obj, Fraction):
        return 1 if obj.denominator == 1 else 2
    w = getattr(obj, "__words__", None)
    if w is not None:
        return w()
    if isinstance(obj, (list, tuple)):
        return sum(state_words(x) for x in obj)
    if isinstance(obj, dict):
        return sum(state_words(x) for x in obj.values())
    if isinstance(obj, types.GeneratorType):
        frame = obj.gi_frame
        if frame is None:
            return 0
        own = sum(state_words(v) for k, v in frame.f_locals.items() if not k.startswith("_"))
        # a suspended ``yield from`` keeps a live subroutine frame
        sub = obj.gi_yieldfrom
        return own + (state_words(sub) if isinstance(sub, types.GeneratorType) else 0)
    if isinstance(obj, (types.FunctionType, types.MethodType, type)):
        return 0
    return sum(state_words(v) for k, v in vars(obj).items() if not k.startswith("_"))


class Slots(list):
    """Fixed-size array of field elements; counted as its length."""

    def __words__(self) -> int:
        return len(self)


class Context:
    """The verifier's private randomness and field configuration."""

    def __init__(self, seed: int, field: PrimeField | None = None, exact: bool = False):
        self.field = field or (F61 if default_prime() == F61.p else PrimeField(default_prime()))
        self.exact = exact
        self._rng = random.Random(seed)
        self.alpha = self.field.random_element(self._rng)
        self._tuple_alphas: list[int] = []
        self._pair = None

    def fingerprint(self, q: int) -> Fingerprint:
        return Fingerprint(self.alpha, q, self.field, self.exact)

    def tuple_fingerprint(self, bounds) -> TupleFingerprint:
        while len(self._tuple_alphas) < len(bounds):
            self._tuple_alphas.append(self.field.random_element(self._rng))
        return TupleFingerprint(self._tuple_alphas[: len(bounds)], bounds, self.field, self.exact)

    def pair_fingerprint(self) -> PairFingerprint:
        if self._pair is None:
            self._pair = (self.field.random_element(self._rng), self.field.random_element(self._rng))
        return PairFingerprint(*self._pair, self.field, self.exact)

    def element(self, low: int = 1) -> int:
        return self.field.random_element(self._rng, low)

    def __words__(self) -> int:
        return 3 + len(self._tuple_alphas) + (2 if self._pair else 0)


class Verifier:
    """Base class: override ``on_stream``, ``on_annotation`` and ``finish``."""

    protocol: ClassVar[str] = ""

    def __init__(self, header: StreamHeader, ctx: Context):
        self.header = header
        self.ctx = ctx
        self._sink: list = []

    @property
    def F(self) -> PrimeField:
        return self.ctx.field

    def on_stream(self, tok: Token) -> None:
        raise NotImplementedError

    def on_annotation(self, tok: Token) -> None:
        raise NotImplementedError

    def finish(self) -> Outcome:
        raise NotImplementedError

    def emit(self, value) -> None:
        self._sink.append(value)

    def emitted(self) -> tuple:
        return tuple(self._sink)

    def words(self) -> int:
        return state_words(self)


def expect(cond: bool, reason: str, detail: str = "") -> None:
    if not cond:
        raise Reject(reason, detail)


def run_protocol(verifier_cls, header: StreamHeader, stream: Iterable[Token],
                 annotation: Iterable[Token], seed: int, *, field: PrimeField | None = None,
                 exact: bool = False, meter: bool | int = True) -> tuple[Outcome, CostReport]:
    """Feed ``stream`` then ``annotation`` through a fresh verifier.

    Deterministic given ``seed``.  Parse failures in either input, domain
    violations and malformed tokens all become :class:`Bottom`.

    ``meter`` may be an integer stride ``k``: state is then measured after
    every ``k``-th token and after every token whose tag differs from its
    predecessor's, which is exact for verifiers whose shape only changes at
    tag boundaries.
    """
    ctx = Context(seed, field, exact)
    hcost = ntok = mlen = 0
    peak = 0
    outcome: Outcome
    try:
        v = verifier_cls(header, ctx)
        stride = 1 if meter is True else int(meter)
        last = None
        if meter:
            peak = v.words()
        for tok in stream:
            mlen += 1
            v.on_stream(tok)
            if meter and (stride == 1 or mlen % stride == 0 or tok.tag != last):
                w = v.words()
                if w > peak:
                    peak = w
            last = tok.tag
        for tok in annotation:
            ntok += 1
            hcost += token_words(tok)
            v.on_annotation(tok)
            if meter and (stride == 1 or ntok % stride == 0 or tok.tag != last):
                w = v.words()
                if w > peak:
                    peak = w
            last = tok.tag
        outcome = v.finish()
        if meter:
            peak = max(peak, v.words())
    except Reject as r:
        outcome = Bottom(r.reason, r.detail)
    except StructureError as e:
        outcome = Bottom("structure", str(e))
    except ParseError as e:
        outcome = Bottom("parse", str(e))
    except FieldError as e:
        outcome = Bottom("domain", str(e))
    except (ValueError, TypeError, IndexError, KeyError, ZeroDivisionError) as e:
        outcome = Bottom("malformed", f"{type(e).__name__}: {e}")
    return outcome, CostReport(hcost, peak, mlen, ntok)


# --- protocol registry ------------------------------------------------------

@dataclass
class Protocol:
    """Everything the harness needs to exercise one protocol end to end.

    ``schema`` maps annotation tags to a string of field kinds, one letter
    per argument: ``n`` node id, ``i`` index, ``v`` value, ``l`` label,
    ``t`` timestamp, ``k`` count, ``f`` flag.  The mutation harness uses it
    to pick plausible corruptions.
    """

    name: str
    verifier: type
    prove: Callable[[StreamHeader, list], list]
    gen: Callable[[random.Random, int], tuple]
    oracle: Callable[[StreamHeader, list], Outcome]
    schema: dict
    canonical: bool = False
    wrong_answer: Optional[Callable[[list, random.Random], Optional[list]]] = None
    node_bound: Callable[[StreamHeader], int] = lambda h: max(h.get("n", 1) or 1, 1)


REGISTRY: dict[str, Protocol] = {}


def register(proto: Protocol) -> Protocol:
    REGISTRY[proto.name] = proto
    return proto


# --- mutations ----------------------------------------------------------------

MUTATION_KINDS = ("drop-token", "duplicate-token", "perturb-value", "swap-adjacent",
                  "relabel", "wrong-answer")


@dataclass(frozen=True)
class MutationSpec:
    kind: str
    position: int
    magnitude: int = 1
    field: int = 0


def _bump(v, delta):
    return v + delta if not isinstance(v, Fraction) else v + Fraction(delta)


def claim_wrong_answer(tokens: list, rng: random.Random, tag: str = "CLAIM") -> list | None:
    """Default wrong-answer mutation: shift the claimed value."""
    for i, t in enumerate(tokens):
        if t.tag == tag and t.args:
            delta = rng.choice((-1, 1)) * rng.randint(1, 3)
            out = list(tokens)
            out[i] = Token(t.tag, (_bump(t.args[0], delta),) + t.args[1:])
            return out
    return None


def apply_mutation(tokens: list, spec: MutationSpec, proto: Protocol, header: StreamHeader,
                   rng: random.Random) -> list | None:
    """Return a mutated copy of ``tokens`` or None if the spec does not apply."""
    if not tokens and spec.kind != "wrong-answer":
        return None
    pos = spec.position % max(len(tokens), 1)
    out = list(tokens)
    if spec.kind == "drop-token":
        del out[pos]
    elif spec.kind == "duplicate-token":
        out.insert(pos, out[pos])
    elif spec.kind == "swap-adjacent":
        if len(out) < 2:
            return None
        pos = min(pos, len(out) - 2)
        if out[pos] == out[pos + 1]:
            return None
        out[pos], out[pos + 1] = out[pos + 1], out[pos]
    elif spec.kind in ("perturb-value", "relabel"):
        tok = out[pos]
        kinds = proto.schema.get(tok.tag, "")
        wanted = "ni" if spec.kind == "relabel" else "vltkf"
        cand = [j for j, k in enumerate(kinds[: len(tok.args)]) if k in wanted]
        if not cand:
            return None
        j = cand[spec.field % len(cand)]
        args = list(tok.args)
        if spec.kind == "relabel":
            nb = proto.node_bound(header)
            if nb < 2:
                return None
            new = rng.randint(1, nb - 1)
            args[j] = new if new < args[j] else new + 1
        else:
            args[j] = _bump(args[j], spec.magnitude * rng.choice((-1, 1)))
        out[pos] = Token(tok.tag, tuple(args))
    elif spec.kind == "wrong-answer":
        hook = proto.wrong_answer or claim_wrong_answer
        return hook(tokens, rng)
    else:
        raise ValueError(f"unknown mutation kind {spec.kind!r}")
    return out


def random_mutation(kind: str, n_tokens: int, rng: random.Random) -> MutationSpec:
    return MutationSpec(kind, rng.randrange(max(n_tokens, 1)), rng.randint(1, 3), rng.randrange(8))


def is_neutral(proto: Protocol, header, stream, honest_outcome, mutated) -> bool:
    """A mutation is neutral if an exact-multiset verifier still accepts it
    with the honest outcome, i.e. it is another valid annotation."""
    if proto.canonical:
        return False
    out, _ = run_protocol(proto.verifier, header, stream, mutated, 0, exact=True, meter=False)
    return out == honest_outcome


def attack(proto: Protocol, header: StreamHeader, stream: list, honest: list,
           kinds: Iterable[str], trials: int, seed: int = 0,
           max_retries: int = 40) -> dict[str, tuple[int, int]]:
    """Empirical rejection table ``kind -> (rejected, attacked runs)``.

    Each trial draws a fresh non-neutral mutation and a fresh verifier seed.
    Kinds that never yield a non-neutral mutation are left out of the table.
    """
    rng = random.Random(seed)
    honest_outcome, _ = run_protocol(proto.verifier, header, stream, honest, rng.getrandbits(32),
                                     meter=False)
    table = {}
    for kind in kinds:
        rejected = runs = 0
        for _ in range(trials):
            mutated = None
            for _ in range(max_retries):
                spec = random_mutation(kind, len(honest), rng)
                cand = apply_mutation(honest, spec, proto, header, rng)
                if cand is None or cand == honest:
                    continue
                if is_neutral(proto, header, stream, honest_outcome, cand):
                    continue
                mutated = cand
                break
            if mutated is None:
                continue
            out, _ = run_protocol(proto.verifier, header, stream, mutated, rng.getrandbits(63),
                                  meter=False)
            runs += 1
            rejected += isinstance(out, Bottom)
        if runs:
            table[kind] = (rejected, runs)
    return table
