import pytest

import degdiff as dd


@pytest.fixture(scope="session")
def bm_table():
    return dd.build_scale_speed(dd.brownian(), 0.0)


@pytest.fixture(scope="session")
def ou_table():
    return dd.build_scale_speed(dd.ornstein_uhlenbeck(), 0.0)


@pytest.fixture(scope="session")
def dw_tables():
    """Right-subinterval tables of the double-well model for c in {0.5, 1.0, 1.5}."""
    return {c: dd.build_scale_speed(dd.double_well(c), 1.0) for c in (0.5, 1.0, 1.5)}


@pytest.fixture(scope="session")
def root12_table():
    return dd.build_scale_speed(dd.root_diffusion(1.2), 1.0)
