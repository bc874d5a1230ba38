"""Shared fixtures: small grids and states reused across test modules."""
import numpy as np
import pytest

from fdvs.chart import InitialDataSpec, make_initial_state
from fdvs.grid import Grid2D, ScalarField


@pytest.fixture(scope="session")
def grid48():
    return Grid2D(nx=48, L=6.0)


@pytest.fixture(scope="session")
def grid96():
    return Grid2D(nx=96, L=6.0)


@pytest.fixture(scope="session")
def small_state(grid96):
    """A smooth, chart-valid state with nonzero velocity fields."""
    data = InitialDataSpec(epsilon=0.05, sigma=1.2, velocity=(1.0, -1.0))
    return make_initial_state(data, grid96)


def gaussian_field(grid, sigma=1.0, center=(0.0, 0.0), amp=1.0):
    X, Y = grid.meshgrid()
    r2 = (X - center[0]) ** 2 + (Y - center[1]) ** 2
    return ScalarField(grid, amp * np.exp(-r2 / (2.0 * sigma ** 2)))


# acceptance-criterion results, printed as one line each after the run
_CRITERIA = []


def record_criterion(num, text, ok):
    _CRITERIA.append((num, text, bool(ok)))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num, text, ok in sorted(_CRITERIA):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {num:2d}: {text}")
