import math

import pytest

from qewlab.disorder import ObstacleDistribution

E_PLUS_1 = math.e + 1.0


@pytest.fixture
def exp2():
    return ObstacleDistribution.exponential(2.0)


ALL_DISTRIBUTIONS = [
    ObstacleDistribution.zero(),
    ObstacleDistribution.constant(1.5),
    ObstacleDistribution.uniform(0.3, 2.6),
    ObstacleDistribution.exponential(2.0),
    ObstacleDistribution.bernoulli(0.5, 1.0),
]


# one line per acceptance criterion, echoed at the end of every session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
