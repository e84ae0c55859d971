import numpy as np
import pytest

import wavewell as ww


def smooth_random_field(grid, rng, scale=1.0, mean_free=False):
    """Band-limited random field: random phases under an exponential envelope."""
    n = grid.n_modes
    k = np.arange(n // 2 + 1)
    coeffs = (rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)) * np.exp(-0.2 * k)
    coeffs[0] = coeffs[0].real
    coeffs[-1] = 0.0
    if mean_free:
        coeffs[0] = 0.0
    samples = np.fft.irfft(coeffs, n=n)
    peak = np.max(np.abs(samples))
    return ww.RealField(grid, samples * (scale / peak))


def random_state(grid, model, rng, scale=1.0):
    return ww.StateUW(
        smooth_random_field(grid, rng, scale),
        smooth_random_field(grid, rng, scale),
        model,
    )


@pytest.fixture(scope="session")
def dd_model():
    return ww.double_dispersion(1.0, 1.0, 3.0)


@pytest.fixture(scope="session")
def grid30():
    return ww.GridSpec(30.0, 1024)


@pytest.fixture(scope="session")
def grid30_fine():
    return ww.GridSpec(30.0, 4096)


@pytest.fixture(scope="session")
def dd_threshold(dd_model, grid30):
    return ww.minimize_embedding_constant(dd_model, grid30)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
