import numpy as np
import pytest

from lenslab.basis import build_basis


@pytest.fixture(scope="session")
def basis64():
    return build_basis(64, 128)


@pytest.fixture(scope="session")
def basis16():
    return build_basis(16, 32)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_coeffs(rng, n, decay=0.0):
    c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return c * np.exp(-decay * np.arange(n))
