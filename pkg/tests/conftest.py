import pytest

from quarterwalk import StartPoint, WalkParams

SYMMETRIC = WalkParams(0.25, 0.25, 0.25, 0.25)
POS_POS = WalkParams(0.3, 0.2, 0.3, 0.2)
ZERO_X = WalkParams(0.25, 0.25, 0.3, 0.2)
ZERO_Y = WalkParams(0.3, 0.2, 0.25, 0.25)
ALL_REGIMES = [SYMMETRIC, POS_POS, ZERO_X, ZERO_Y]
ORIGIN_NEIGHBOUR = StartPoint(1, 1)


@pytest.fixture
def symmetric():
    return SYMMETRIC


@pytest.fixture
def pos_pos():
    return POS_POS


@pytest.fixture
def start11():
    return ORIGIN_NEIGHBOUR


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
