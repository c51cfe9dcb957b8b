import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_simplex_rows(rng, n, m):
    return rng.dirichlet(np.ones(m), size=n)
