import pytest

from meetlab.graph import generate
from meetlab.hitting import ext_hitting_formula, hitting_times
from meetlab.states import StateSpace


@pytest.fixture(scope="session")
def p2():
    return generate("path", 2)


@pytest.fixture(scope="session")
def p3():
    return generate("path", 3)


@pytest.fixture(scope="session")
def k3():
    return generate("complete", 3)


def tables(g):
    ss = StateSpace(g)
    h = hitting_times(g)
    return ss, h, ext_hitting_formula(ss, h)


SMALL_GRAPHS = [
    ("path", 2, None, None),
    ("path", 3, None, None),
    ("path", 5, None, None),
    ("cycle", 4, None, None),
    ("cycle", 5, None, None),
    ("complete", 3, None, None),
    ("complete", 4, None, None),
    ("star", 5, None, None),
    ("lollipop", 6, 3, None),
    ("random_connected", 6, None, 11),
]


def small_graph_ids():
    return [f"{f}-{n}" + (f"-{k}" if k else "") + (f"-s{s}" if s else "") for f, n, k, s in SMALL_GRAPHS]


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
