import os

import pytest
from hypothesis import HealthCheck, settings

from toric_slabs import kaehler_data, load_fixture

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Decompositions beyond the built-in fixtures.
LONG_INTERVAL = {"dim": 1, "vertices": [[-1], [0], [1], [2]], "maximal_cells": [[0, 1], [1, 2], [2, 3]], "base_cell": 0}
HEXAGON = {
    "dim": 2,
    "vertices": [[0, 0], [1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1]],
    "maximal_cells": [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 6], [0, 6, 1]],
    "base_cell": 0,
}
KITE = {
    "dim": 2,
    "vertices": [[0, 0], [1, 0], [0, 1], [-1, -1], [1, 1]],
    "maximal_cells": [[0, 1, 4], [0, 4, 2], [0, 2, 3], [0, 3, 1]],
    "base_cell": 0,
}


@pytest.fixture(scope="session")
def fx():
    """``fx(name) -> (dec, kd)`` with caching across the session."""
    cache = {}

    def get(name):
        if name not in cache:
            dec = load_fixture(name)
            cache[name] = (dec, kaehler_data(dec))
        return cache[name]

    return get


# Acceptance lines are collected here and echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
