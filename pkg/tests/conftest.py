import sys

import numpy as np
import pytest

from helpers import DATA, barbell_edges, to_graph
from leidenfusion.graph import load_edge_list


@pytest.fixture(scope="session")
def karate():
    return load_edge_list(DATA / "karate.tsv")


@pytest.fixture
def barbell():
    return to_graph(6, barbell_edges())


@pytest.fixture
def triangle():
    return to_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS):
        terminalreporter.write_line(line)
