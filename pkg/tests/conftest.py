import time

import numpy as np
import pytest

from dnls_asymptotics import cauchy, pde, scattering
from dnls_asymptotics.scattering import ReflectionCoefficient

PROBE_TIMES = [20.0, 40.0, 80.0, 160.0]


def gauss(amplitude):
    return lambda x: amplitude * np.exp(-x ** 2)


@pytest.fixture(scope="session")
def q03():
    return scattering.Potential.from_function(gauss(0.3))


@pytest.fixture(scope="session")
def rc03_timed(q03):
    t = time.perf_counter()
    rc = scattering.reflection_map(q03, scattering.symmetric_grid(8.0, 257))
    return rc, time.perf_counter() - t


@pytest.fixture(scope="session")
def rc03(rc03_timed):
    return rc03_timed[0]


@pytest.fixture(scope="session")
def kap03(rc03):
    return cauchy.Kappa(rc03)


@pytest.fixture(scope="session")
def forward_run(q03):
    """The 0.3-Gaussian evolved to t = 160 on the default box; (states, seconds)."""
    t = time.perf_counter()
    states = pde.evolve_gi(q03, PROBE_TIMES[-1], PROBE_TIMES)
    return states, time.perf_counter() - t


def synthetic_rc(rho_func, z_max=8.0, n=257):
    z = np.linspace(-z_max, z_max, n)
    return ReflectionCoefficient(z, rho_func(z))


@pytest.fixture(scope="session")
def rc_half():
    # |rho(+-1)| = 1/2 exactly, smooth and decaying
    return synthetic_rc(lambda z: 0.5 * np.exp(-((z * z - 1) ** 2)) * np.exp(0.3j * z))


@pytest.fixture(scope="session")
def rc_zero():
    return synthetic_rc(lambda z: np.zeros_like(z, dtype=complex))
