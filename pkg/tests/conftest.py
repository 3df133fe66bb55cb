import math
import os

import numpy as np
import pytest

from cifc_regions.dmc import CifcDmcSpec, InputPolicy
from cifc_regions.models import GaussianCifcSpec

SPEC_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "specs")


@pytest.fixture(autouse=True)
def clean_environment():
    """Clean environment variables before each test"""
    # Save original environment
    env_orig = dict(os.environ)

    # Run test
    yield

    # Restore original environment
    os.environ.clear()
    os.environ.update(env_orig)


@pytest.fixture
def spec_dir():
    """Directory of the example spec files shipped with the repository"""
    return SPEC_DIR


@pytest.fixture
def worked_example():
    """Gaussian channel with P = (3, 6, 3) and strong cross and cognitive links"""
    c = math.sqrt(1.5)
    return GaussianCifcSpec(gains=[[1, 7, 3], [5, 1, 15], [c, c, 1]], powers=[3, 6, 3])


def identity_transition(sizes=(2, 2, 2)):
    """Noiseless separate links Y_u = X_u."""
    a, b, c = sizes
    law = np.zeros((a, b, c, a, b, c))
    for x1 in range(a):
        for x2 in range(b):
            for x3 in range(c):
                law[x1, x2, x3, x1, x2, x3] = 1.0
    return law


@pytest.fixture
def identity_links():
    """Binary channel whose receivers see their own transmitter without noise"""
    return CifcDmcSpec.from_array(identity_transition())


@pytest.fixture
def make_random_channel():
    """Factory for random channels with independent Dirichlet output laws"""
    def _make(rng, sizes=(2, 2, 2), outputs=(2, 2, 2)):
        a, b, c = sizes
        law = rng.dirichlet(np.ones(int(np.prod(outputs))), size=(a, b, c))
        return CifcDmcSpec.from_array(law.reshape((a, b, c) + tuple(outputs)))
    return _make


@pytest.fixture
def make_random_policy():
    """Factory for random input policies"""
    def _make(rng, sizes=(2, 2, 2)):
        a, b, c = sizes
        return InputPolicy.from_arrays(
            rng.dirichlet(np.ones(a)),
            rng.dirichlet(np.ones(b)),
            rng.dirichlet(np.ones(c), size=(a, b)),
        )
    return _make


@pytest.fixture
def identity_law():
    """Transition array of the noiseless separate-links channel"""
    return identity_transition()
