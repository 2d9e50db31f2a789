import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from _support import EXAMPLE_ADJ  # noqa: E402

from nlconsensus import WeightedDigraph  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def example_graph():
    return WeightedDigraph(EXAMPLE_ADJ)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
