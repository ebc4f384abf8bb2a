import pytest
from fractions import Fraction
from hypothesis import given, settings
from hypothesis import strategies as st

from annostream import REGISTRY
from annostream.graphs import graph_stream
from annostream.stream import (ParseError, StructureError, T, load_stream, read_annotation,
                               token_words, write_annotation, write_stream)


def test_parse_graph_stream():
    header, toks = load_stream("AS1 graph n=3 m=2\ne 1 2\ne 2 3\n")
    assert header.n == 3 and header.m == 2
    assert toks == [T("e", 1, 2), T("e", 2, 3)]


def test_empty_body():
    header, toks = load_stream("AS1 graph n=3 m=0\n")
    assert toks == []


def test_index_below_one():
    with pytest.raises(ParseError):
        load_stream("AS1 graph n=3 m=1\ne 0 2\n")


def test_count_mismatch():
    with pytest.raises(StructureError):
        load_stream("AS1 graph n=3 m=2\ne 1 2\n")


def test_stream_round_trip():
    header, toks = graph_stream("wgraph", 4, [(1, 2, 3), (3, 4, 0)], wmax=5)
    again = load_stream(write_stream(header, toks))
    assert again[1] == toks and again[0].params == header.params


def test_empty_annotation_round_trip():
    assert list(read_annotation(write_annotation([]))) == []


def test_label_row_round_trip():
    toks = [T("LABEL-NODE", 1, 0, 2)]
    assert list(read_annotation(write_annotation(toks, "labels"))) == toks


values = st.one_of(st.integers(-10 ** 12, 10 ** 12),
                   st.fractions(max_denominator=10 ** 6).filter(lambda f: f.denominator != 1))
tokens = st.builds(lambda tag, args: T(tag, *args),
                   st.sampled_from(["CLAIM", "LP-X", "MV-EVAL", "DFS-PUSH"]),
                   st.lists(values, max_size=5))


@settings(max_examples=300)
@given(st.lists(tokens, max_size=30))
def test_annotation_round_trip(toks):
    assert list(read_annotation(write_annotation(toks, "x"))) == toks


def test_truncation_never_parses_silently():
    header, stream = graph_stream("digraph", 4, [(1, 2), (2, 3), (3, 4)])
    text = write_annotation(REGISTRY["dag"].prove(header, stream), "dag")
    for cut in range(len(text)):
        with pytest.raises(ParseError):
            list(read_annotation(text[:cut]))


def test_token_words():
    assert token_words(T("X", 1, 2)) == 2
    assert token_words(T("X", Fraction(1, 2))) == 2
    assert token_words(T("X", Fraction(4, 2))) == 1
