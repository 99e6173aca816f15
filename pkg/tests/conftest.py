"""Shared fixtures: small media, pulses and grids that run in well under a second."""

import pytest

from src.config import Config, set_config
from src.mb_solver import simulate
from src.model import Constant, ProbePulse, SimGrid

from .helpers import medium


@pytest.fixture(autouse=True)
def _default_config():
    set_config(Config())
    yield
    set_config(Config())


@pytest.fixture
def short_pulse() -> ProbePulse:
    return ProbePulse(sigma_tau=0.3, t_center=2.0)


@pytest.fixture
def free_result(short_pulse):
    """Empty-medium run: the output is the input, sample for sample."""
    grid = SimGrid.from_step(0.005, 6.0, 20)
    return simulate(medium(0.0), Constant(0.0), short_pulse, grid)


@pytest.fixture
def short_grid() -> SimGrid:
    return SimGrid.from_step(0.005, 6.0, 50)
