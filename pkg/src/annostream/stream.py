"""Stream and annotation tokens with the AS1/AN1 line formats.

Stream file (AS1)::

    AS1 graph n=3 m=2
    e 1 2
    e 2 3

The ``AS1`` magic is optional on input.  The header names the stream kind and
carries ``key=value`` parameters; ``m`` is the number of body lines.

Annotation file (AN1)::

    AN1 dag
    CLAIM 1
    DAG-TOPO
    ...
    END 17

Every line is ``TAG arg...``; arguments are decimal integers or ``num/den``
rationals.  The ``END`` trailer carries the token count and the file must end
with a newline, so any truncation is detected.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

STREAM_MAGIC = "AS1"
ANNOTATION_MAGIC = "AN1"


class ParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class StructureError(ParseError):
    """Well-formed lines that do not add up to a well-formed file."""


class Token(NamedTuple):
    tag: str
    args: tuple = ()

    def __repr__(self):
        return f"{self.tag}{self.args!r}"


def T(tag: str, *args) -> Token:
    return Token(tag, tuple(args))


def value_words(v) -> int:
    return 2 if isinstance(v, Fraction) and v.denominator != 1 else 1


def token_words(tok: Token) -> int:
    """Machine words of payload: one per index/value, two per rational."""
    return sum(value_words(a) for a in tok.args)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool):
        return str(int(v))
    return str(int(v))


def _num(s: str, line: int):
    try:
        if "/" in s:
            num, den = s.split("/")
            f = Fraction(int(num), int(den))
            return f.numerator if f.denominator == 1 else f
        return int(s)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad number {s!r}", line) from None


# --- stream kinds -------------------------------------------------------

# tag -> (arity, number of leading index fields); indices are 1-based
STREAM_KINDS = {
    "graph": {"e": 2},
    "digraph": {"e": 2},
    "wgraph": {"e": 3},
    "wdigraph": {"e": 3},
    "lp": {"A": 3, "b": 2, "c": 2},
    "matrix": {"M": 3, "x": 2, "e": 2},
    "mem": {"r": 2, "w": 2},
}

_INT_HEADER_KEYS = {"n", "m", "b", "c", "s", "t", "nl", "wmax", "vbound", "amax", "vnum", "vden"}


@dataclass
class StreamHeader:
    kind: str
    params: dict = field(default_factory=dict)

    def __getattr__(self, key):
        try:
            return self.params[key]
        except KeyError:
            raise AttributeError(key) from None

    def get(self, key, default=None):
        return self.params.get(key, default)

    @property
    def m(self) -> int:
        return self.params.get("m", 0)

    def line(self) -> str:
        parts = [STREAM_MAGIC, self.kind]
        parts += [f"{k}={_fmt(v) if not isinstance(v, str) else v}" for k, v in self.params.items()]
        return " ".join(parts)

    def __words__(self) -> int:
        return len(self.params)


def _parse_header(line: str, lineno: int) -> StreamHeader:
    parts = line.split()
    if parts and parts[0] == STREAM_MAGIC:
        parts = parts[1:]
    if not parts or parts[0] not in STREAM_KINDS:
        raise ParseError(f"unknown stream kind in header {line!r}", lineno)
    params = {}
    for kv in parts[1:]:
        if "=" not in kv:
            raise ParseError(f"bad header field {kv!r}", lineno)
        k, v = kv.split("=", 1)
        params[k] = _num(v, lineno) if (k in _INT_HEADER_KEYS or v.lstrip("-").replace("/", "").isdigit()) else v
    params.setdefault("m", 0)
    return StreamHeader(parts[0], params)


def _index_bounds(header: StreamHeader, tag: str) -> tuple:
    k, p = header.kind, header.params
    if k in ("graph", "digraph", "wgraph", "wdigraph") or tag == "e":
        return (p.get("n", 0), p.get("n", 0))
    if k == "lp":
        return {"A": (p.get("b", 0), p.get("c", 0)), "b": (p.get("b", 0),), "c": (p.get("c", 0),)}[tag]
    if k == "matrix":
        return {"M": (p.get("b", 0), p.get("c", 0)), "x": (p.get("c", 0),)}[tag]
    if k == "mem":
        return (p.get("amax", 0),)
    return ()


def check_stream_token(header: StreamHeader, tok: Token, lineno: int | None = None) -> None:
    arity = STREAM_KINDS[header.kind].get(tok.tag)
    if arity is None:
        raise ParseError(f"token {tok.tag!r} not allowed in {header.kind} stream", lineno)
    if len(tok.args) != arity:
        raise ParseError(f"{tok.tag} expects {arity} fields", lineno)
    for idx, bound in zip(tok.args, _index_bounds(header, tok.tag)):
        if not isinstance(idx, int) or not 1 <= idx <= bound:
            raise ParseError(f"index {idx} outside [1, {bound}]", lineno)
    if header.kind in ("wgraph", "wdigraph"):
        w = tok.args[2]
        if not isinstance(w, int) or w < 0 or ("wmax" in header.params and w > header.wmax):
            raise ParseError(f"bad weight {w}", lineno)


def parse_stream(data) -> tuple[StreamHeader, Iterator[Token]]:
    """Parse an AS1 stream from text, bytes, or a text file object.

    Returns the header and a lazy iterator over the body tokens.  Structural
    errors (token count differing from ``m``) surface when the iterator is
    exhausted.
    """
    if isinstance(data, bytes):
        data = data.decode()
    fh = io.StringIO(data) if isinstance(data, str) else data
    first = fh.readline()
    while first and not first.strip():
        first = fh.readline()
    if not first:
        raise ParseError("empty stream", 1)
    header = _parse_header(first.strip(), 1)

    def body():
        count = 0
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            tok = Token(parts[0], tuple(_num(a, lineno) for a in parts[1:]))
            check_stream_token(header, tok, lineno)
            count += 1
            yield tok
        if count != header.m:
            raise StructureError(f"header declares m={header.m} but body has {count} tokens")

    return header, body()


def write_stream(header: StreamHeader, tokens: Iterable[Token]) -> str:
    tokens = list(tokens)
    header.params["m"] = len(tokens)
    lines = [header.line()]
    lines += [" ".join([t.tag, *map(_fmt, t.args)]) for t in tokens]
    return "\n".join(lines) + "\n"


def load_stream(data) -> tuple[StreamHeader, list[Token]]:
    header, body = parse_stream(data)
    return header, list(body)


# --- annotations --------------------------------------------------------

def write_annotation(tokens: Iterable[Token], protocol: str = "") -> str:
    out = [f"{ANNOTATION_MAGIC} {protocol}".rstrip()]
    n = 0
    for t in tokens:
        if not t.tag or any(c.isspace() for c in t.tag) or t.tag == "END":
            raise ValueError(f"bad tag {t.tag!r}")
        out.append(" ".join([t.tag, *map(_fmt, t.args)]))
        n += 1
    out.append(f"END {n}")
    return "\n".join(out) + "\n"


def annotation_protocol(data: str) -> str:
    first = data.split("\n", 1)[0].split()
    if not first or first[0] != ANNOTATION_MAGIC:
        raise ParseError("missing AN1 magic", 1)
    return first[1] if len(first) > 1 else ""


def read_annotation(data, known_tags: set | None = None) -> Iterator[Token]:
    """Lazily parse an AN1 annotation.

    Tokens are yielded as soon as their line is complete; a missing or
    inconsistent ``END`` trailer raises :class:`StructureError` at the end.
    """
    if isinstance(data, bytes):
        data = data.decode()
    if not data.endswith("\n"):
        # a truncated file can still parse line-wise; refuse it up front
        raise StructureError("annotation does not end with a newline")
    lines = data.split("\n")[:-1]
    if not lines or lines[0].split()[:1] != [ANNOTATION_MAGIC]:
        raise ParseError("missing AN1 magic", 1)
    count = 0
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            raise ParseError("blank line", lineno)
        if parts[0] == "END":
            if len(parts) != 2 or _num(parts[1], lineno) != count or lineno != len(lines):
                raise StructureError("END trailer does not match token count", lineno)
            return
        if known_tags is not None and parts[0] not in known_tags:
            raise ParseError(f"unknown tag {parts[0]!r}", lineno)
        count += 1
        yield Token(parts[0], tuple(_num(a, lineno) for a in parts[1:]))
    raise StructureError("missing END trailer")
