import numpy as np
import pytest

from kirchhoff_spectral import IntegratorConfig, Spectrum, SpectralVector


@pytest.fixture
def unit_spectrum():
    return Spectrum([1.0])


@pytest.fixture
def small_spectrum():
    return Spectrum([1.0, 2.0, 3.0])


@pytest.fixture
def tight_cfg():
    return IntegratorConfig(rel_tol=1e-10, abs_tol=1e-10)


def random_vector(spectrum, rng, scale=1.0, decay=1.5):
    lam = np.maximum(spectrum.lambdas, 1.0)
    return SpectralVector(
        spectrum, scale * rng.standard_normal(spectrum.n) / lam**decay
    )
