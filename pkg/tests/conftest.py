import numpy as np
import pytest

from steepwater.graph_core import WeightedGraph


def random_graph(rng, n=8, levels=8, extra=0.3):
    """Connected graph: random spanning tree plus each other pair with probability ``extra``."""
    weights = tuple(int(v) for v in rng.integers(0, levels, n))
    order = rng.permutation(n)
    edges = set()
    for k in range(1, n):
        a, b = int(order[k]), int(order[rng.integers(0, k)])
        edges.add((min(a, b), max(a, b)))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < extra:
                edges.add((i, j))
    return WeightedGraph.from_edges(weights, edges)


def random_image(rng, shape=(8, 8), levels=8):
    return rng.integers(0, levels, shape).astype(np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when not in ("setup", "call"):
        return
    number, title = mark.args
    failed = call.excinfo is not None
    prev = _CRITERIA.get(number, (title, True))
    _CRITERIA[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title}")
