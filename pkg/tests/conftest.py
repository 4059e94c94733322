import math

import numpy as np
import pytest

from swapsim.geometry import MeasurementDirection

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def equatorial(phi):
    return MeasurementDirection.equatorial(phi)


ZPLUS = MeasurementDirection(0.0, 0.0)
ZMINUS = MeasurementDirection(math.pi, 0.0)
