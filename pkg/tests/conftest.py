import numpy as np
import pytest

from bundler.liouville import SystemParams


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance verdict lines collected during the run."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture
def fig1_params():
    """Two-photon spectral-anatomy configuration."""
    return SystemParams(omega=5.0, delta_a=5.0, gamma_a=1.3, gamma_sigma=0.01)


@pytest.fixture
def fig2_params():
    """Strong-driving two-photon resonance configuration."""
    return SystemParams(omega=20.0, delta_a=20.0, gamma_a=0.1, gamma_sigma=0.01)


def random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (m + m.conj().T)


def random_state(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = m @ m.conj().T
    return rho / np.trace(rho)
