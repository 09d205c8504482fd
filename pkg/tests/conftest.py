import numpy as np
import pytest

from shearstab.grid import build_grid
from shearstab.profiles import make_default_profile


@pytest.fixture(scope="session")
def grid():
    return build_grid(200, 30.0, "stretched")


@pytest.fixture(scope="session")
def grid_uniform():
    return build_grid(128, 30.0, "uniform")


@pytest.fixture(scope="session")
def profile():
    return make_default_profile(0.5)


@pytest.fixture(scope="session")
def profile_m03():
    return make_default_profile(0.3)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
