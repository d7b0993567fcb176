import json
import sys
from pathlib import Path

import numpy as np
import pytest

from gpfield.background import constant_background
from gpfield.nonlinearity import make_gross_pitaevskii
from gpfield.spectral import Field, Grid, h1_norm

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text())


def bump(grid, h1=0.1, width=2.0):
    """Gaussian bump ``exp(-|x|^2/width^2)`` scaled to the given H^1 norm."""
    w = Field(grid, np.exp(-grid.radius**2 / width**2).astype(complex))
    return w * (h1 / h1_norm(w))


@pytest.fixture
def gp():
    return make_gross_pitaevskii(1.0)


@pytest.fixture
def grid2d():
    return Grid(2, 128, 20.0)


@pytest.fixture
def small2d():
    return Grid(2, 32, 8.0)


@pytest.fixture
def const_bg(grid2d):
    return constant_background(grid2d, 1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
