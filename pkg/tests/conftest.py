import os
from pathlib import Path

import pytest

from mqcensus.quadratic import WATKINS_BOUND, QuadraticCensus, build_census

CACHE_DIR = Path(__file__).parent / ".cache"
JOBS = os.cpu_count() or 1


@pytest.fixture(scope="session")
def cache_dir():
    CACHE_DIR.mkdir(exist_ok=True)
    return CACHE_DIR


@pytest.fixture(scope="session")
def small_census():
    """Exact Q_0..Q_2 (enough for m <= 1)."""
    return build_census(6500, 2)


@pytest.fixture(scope="session")
def full_census(cache_dir):
    """Q_0..Q_6 over every |d| below the Watkins bound, cached on disk."""
    path = cache_dir / f"census_B{WATKINS_BOUND}.tsv"
    if path.exists():
        return QuadraticCensus.load(path)
    census = build_census(WATKINS_BOUND, 6, JOBS)
    census.save(path)
    return census


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def report_line():
    def record(line):
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
