import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from swarmguard.commgraph import CommGraph  # noqa: E402
from swarmguard.scenario import Geometry, make_scenario  # noqa: E402

_criteria: list[tuple[int, str, str, list]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        notes = [v for k, v in item.user_properties if k == "note"]
        _criteria.append((marker.args[0], marker.args[1], status, notes))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, notes in sorted(_criteria):
        terminalreporter.write_line(f"criterion {number} [{title}]: {status}")
        for note in notes:
            terminalreporter.write_line(f"    {note}")


@pytest.fixture
def note(record_property):
    """Attach a measurement line to the acceptance summary."""

    def add(text: str) -> None:
        print(text)
        record_property("note", text)

    return add


# --- shared fixtures ---------------------------------------------------------------

# 1-based labels of the 15-robot topology in the clique-partition walk-through
RING15_EDGES = [
    (3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6),
    (1, 2), (2, 4), (2, 8), (4, 8), (8, 7), (4, 11),
    (7, 9), (7, 10), (7, 11), (9, 10), (9, 11), (10, 11),
    (12, 13), (12, 14), (12, 15), (13, 14), (13, 15), (14, 15),
    (6, 12), (5, 13),
]  # fmt: skip

# positions whose r_c = 10 disk graph is exactly RING15_EDGES (every pair at least ~1 m from the boundary)
RING15_POSITIONS = [
    (0.0, 0.0), (7.1, 5.48), (8.26, 16.84), (13.91, 11.37), (16.03, 15.5),
    (14.79, 20.26), (17.92, 1.1), (9.81, 5.0), (25.22, 5.15), (23.36, 4.61),
    (20.8, 5.58), (22.89, 24.12), (25.0, 16.17), (28.04, 24.17), (26.74, 24.7),
]  # fmt: skip
RING15_RANGE = 10.0

SIX_EDGES = [(1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6)]


def zero_based(edges):
    return [(a - 1, b - 1) for a, b in edges]


@pytest.fixture
def ring15_graph():
    return CommGraph.from_edges(15, zero_based(RING15_EDGES))


@pytest.fixture
def six_graph():
    return CommGraph.from_edges(6, zero_based(SIX_EDGES))


@pytest.fixture
def two_robot_scenario():
    """Two robots, four collinear targets; robot 0 forward sees t2,t3, robot 1 left sees all four."""
    return make_scenario(
        [(-2.0, 5.0), (0.0, 0.0)],
        [(0.0, 2.0), (0.0, 4.0), (0.0, 6.0), (0.0, 8.0)],
        comm_range=10.0,
        geometry=Geometry(10.0, 3.0),
    )


# action ids in the two-robot fixture
X1_FORWARD = 0  # robot 0, forward
X2_LEFT = 7  # robot 1, left
