import numpy as np
import pytest

from nlslab import StepConfig, evolve, exact_soliton, make_grid
from nlslab.profiles import random_localized, sech_profile


@pytest.fixture(scope="session")
def grid512():
    return make_grid(512, 40.0)


@pytest.fixture(scope="session")
def boosted_traj(grid512):
    """Boosted cubic soliton over t in [0, 5], the conservation workhorse."""
    u0 = exact_soliton(1.0, 0.3, 0.0, 0.0, 0.0, grid512)
    return evolve(u0, 3.0, StepConfig(dt=1e-3, t_final=5.0, observer_stride=10))


@pytest.fixture(scope="session")
def quintic_traj():
    """Subcritical quintic run on a wide box (dispersive tails stay inside)."""
    g = make_grid(1024, 80.0)
    return evolve(0.3 * sech_profile(g), 5.0, StepConfig(dt=1e-3, t_final=5.0, observer_stride=5))


def random_field(grid, seed, envelope_width=3.0):
    return random_localized(grid, seed, envelope_width=envelope_width)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
