import numpy as np
import pytest


def ginibre_density(rng, dim):
    """Random full-rank density matrix from a complex Gaussian factor."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_direction(rng):
    from tomobell.wigner import MeasurementDirection

    return MeasurementDirection(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))


@pytest.fixture
def random_density():
    return ginibre_density


@pytest.fixture
def direction_factory():
    return random_direction
