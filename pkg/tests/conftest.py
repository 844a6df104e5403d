import pytest

from morreylab.grid import GridSpec


@pytest.fixture(scope="session")
def line():
    """The standard 1D grid: L = 8, N = 1024, h = 1/64."""
    return GridSpec(1, 8.0, 1024)


@pytest.fixture(scope="session")
def small_line():
    return GridSpec(1, 4.0, 256)


@pytest.fixture(scope="session")
def plane():
    return GridSpec(2, 4.0, 128)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
