import numpy as np
import pytest

from qpricer.market import PAPER_SCENARIO, discretize


@pytest.fixture(scope="session")
def scenario():
    return PAPER_SCENARIO


@pytest.fixture(scope="session")
def dist8(scenario):
    return discretize(scenario, 8)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240101)
