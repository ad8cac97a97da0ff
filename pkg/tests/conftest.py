import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from prolate import spectral

settings.register_profile("default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

A_VALUES = (0.5, 1.0, 2.0, 4.0)


@pytest.fixture(scope="session")
def spectra():
    return {a: spectral.spectrum(a, 8) for a in A_VALUES}


@pytest.fixture(scope="session")
def shooting():
    out = {}
    for a in A_VALUES:
        window = (0.0, spectral.eigenvalue_bounds(a, 7)[1] + 1.0)
        out[a] = spectral.eigenvalues_by_shooting(a, window)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
