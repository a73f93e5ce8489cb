import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def make_rng():
    def factory(seed):
        return np.random.default_rng(seed)

    return factory
