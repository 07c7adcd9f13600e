import numpy as np
import pytest

from aniso.spectral import make_grid, random_field

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid2():
    return make_grid(2, 32, 8.0)


@pytest.fixture
def grid3():
    return make_grid(3, 16, 8.0)


def smooth_field(grid, rng, s=2.0, band_limited=False):
    return random_field(grid, s + grid.d / 2 + 1, rng, band_limited=band_limited)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
