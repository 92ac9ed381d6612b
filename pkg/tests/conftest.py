import numpy as np
import pytest

from nonlocality.bounds import CurveBank


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def curve_bank():
    return CurveBank()


def haar_vector(rng, d):
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return z / np.linalg.norm(z)
