import pytest

from annostream import REGISTRY, run_protocol
from annostream.graphs import graph_stream


def run(name, header, stream, seed=0, annotation=None, **kw):
    proto = REGISTRY[name]
    ann = proto.prove(header, stream) if annotation is None else annotation
    return run_protocol(proto.verifier, header, stream, ann, seed, **kw)


def run_graph(name, kind, n, edges, **params):
    return run(name, *graph_stream(kind, n, edges, **params))


@pytest.fixture
def verify():
    return run


# one PASS/FAIL line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
