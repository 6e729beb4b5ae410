import numpy as np
import pytest

from engelflex import loops


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def loop1():
    return loops.random_loop(1, np.random.default_rng(7))
