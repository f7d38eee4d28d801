import numpy as np
import pytest

from nlsplit.spectral import SpectralField


def random_field(rng, num_modes, decay=1.0):
    k = np.fft.fftfreq(2 * num_modes, d=1.0 / (2 * num_modes))
    c = rng.standard_normal(2 * num_modes) + 1j * rng.standard_normal(2 * num_modes)
    return SpectralField(c / (1.0 + np.abs(k)) ** decay)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240611))
