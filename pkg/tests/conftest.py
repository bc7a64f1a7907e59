import hypothesis
import numpy as np
import pytest

from gma.arrays import ArrayConfig, wavelength_from_frequency

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("default")

WAVELENGTH = wavelength_from_frequency(28e9)


@pytest.fixture
def cfg_small():
    """16-element array, 4 RF chains, region of 20 wavelengths."""
    return ArrayConfig(M=16, N=4, wavelength=WAVELENGTH,
                       y_min=0.0, y_max=20.0 * WAVELENGTH)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
