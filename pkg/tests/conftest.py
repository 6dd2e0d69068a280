import pytest
from hypothesis import settings

from leavitt_complex.quiver import parse_quiver, random_quiver

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ONE_LOOP = """
quiver one_loop
vertex 1
arrow a : 1 -> 1
"""

TWO_LOOPS = """
quiver two_loops
vertex 1
arrow a1 : 1 -> 1 associated
arrow a2 : 1 -> 1
"""

CYCLE = """
quiver cycle_with_chord
vertex 1
vertex 2
vertex 3
arrow b1 : 1 -> 2 associated
arrow b2 : 2 -> 3 associated
arrow b3 : 3 -> 1
arrow c : 1 -> 1 associated
arrow d : 3 -> 2
"""


@pytest.fixture(scope="session")
def one_loop():
    return parse_quiver(ONE_LOOP)


@pytest.fixture(scope="session")
def two_loops():
    return parse_quiver(TWO_LOOPS)


@pytest.fixture(scope="session")
def cycle():
    return parse_quiver(CYCLE)


RANDOM_SEEDS = list(range(25))


@pytest.fixture(scope="session")
def random_quivers():
    return [random_quiver(s) for s in RANDOM_SEEDS]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS, key=str):
        ok, text = RESULTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {text}")
