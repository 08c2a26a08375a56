import numpy as np
import pytest

from pencilspec import GridFunction, PencilPotentials
from pencilspec.ensemble import random_pair


@pytest.fixture(scope="session")
def free_pp():
    return PencilPotentials.zero(1025)


@pytest.fixture(scope="session")
def ensemble():
    return [random_pair(seed) for seed in range(5)]


def const_pair(c, n=1025):
    x = np.linspace(0.0, 1.0, n)
    return PencilPotentials(GridFunction.constant(c, n), GridFunction(c * c * (1 - x)))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
