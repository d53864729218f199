import numpy as np
import pytest

from geodepth.bisector import PairCache
from geodepth.constructions import get_polygon
from geodepth.geodesic import build_engine

# acceptance lines collected by test_acceptance.py, echoed in the summary
ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def engines():
    """One engine per library polygon, built lazily."""
    cache = {}

    def get(pid):
        if pid not in cache:
            cache[pid] = build_engine(get_polygon(pid))
        return cache[pid]

    return get


@pytest.fixture(scope="session")
def square(engines):
    return engines("big-square")


@pytest.fixture(scope="session")
def comb(engines):
    return engines("comb-6")


@pytest.fixture(scope="session")
def lshape(engines):
    return engines("L-shape")


@pytest.fixture
def small_square_set(square):
    S = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 2.0], [0.3, -1.7], [2.2, 0.9], [-1.9, 1.4]])
    return square, S, PairCache(square, S)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
