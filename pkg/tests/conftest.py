import os

import pytest
from hypothesis import HealthCheck, settings

from riopt.funcrep import make_log_grid

settings.register_profile(
    "riopt",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "riopt"))


@pytest.fixture(scope="session")
def grid():
    """The default grid: t_min = 1e-30, 64 points per decade."""
    return make_log_grid(1e-30, 64)


@pytest.fixture(scope="session")
def coarse():
    """A small grid for sweeps: t_min = 1e-12, 16 points per decade."""
    return make_log_grid(1e-12, 16)
