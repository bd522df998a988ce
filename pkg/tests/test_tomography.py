import numpy as np
import pytest
from numpy.testing import assert_allclose

from tomobell.states import partial_trace, werner_state
from tomobell.tomography import (
    correlation,
    local_spin_tomogram,
    local_unitary_tomogram,
    spin_tomogram,
    tomogram_expectation,
    unitary_tomogram,
)
from tomobell.wigner import MeasurementDirection, wigner_D

SPIN_UP = np.diag([1.0, 0.0]).astype(complex)


def test_unitary_tomogram_identity_basis():
    probs = unitary_tomogram(SPIN_UP, np.eye(2))
    assert_allclose(probs, [1.0, 0.0])


def test_unitary_tomogram_maximally_mixed_is_uniform(direction_factory):
    rng = np.random.default_rng(41)
    for d in (2, 3):
        u = wigner_D(d - 1, direction_factory(rng))
        probs = unitary_tomogram(np.eye(d) / d, u)
        assert_allclose(probs, np.full(d, 1.0 / d), atol=1e-14)


def test_unitary_tomogram_qubit_rotation():
    rng = np.random.default_rng(42)
    for _ in range(10):
        theta = rng.uniform(0, np.pi)
        direction = MeasurementDirection(theta, rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))
        probs = unitary_tomogram(SPIN_UP, wigner_D(1, direction))
        assert_allclose(probs, [np.cos(theta / 2) ** 2, np.sin(theta / 2) ** 2], atol=1e-13)


def test_unitary_tomogram_rejects_non_unitary():
    with pytest.raises(ValueError, match="unitary"):
        unitary_tomogram(SPIN_UP, np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(ValueError, match="mismatch"):
        unitary_tomogram(SPIN_UP, np.eye(3))


def test_spin_tomogram_poles():
    assert_allclose(spin_tomogram(SPIN_UP, 1, MeasurementDirection(0.0)), [1.0, 0.0], atol=1e-15)
    assert_allclose(spin_tomogram(SPIN_UP, 1, MeasurementDirection(np.pi)), [0.0, 1.0], atol=1e-15)


def test_spin_tomogram_gamma_invariance(random_density):
    rng = np.random.default_rng(43)
    rho = random_density(rng, 3)
    for _ in range(20):
        theta, phi = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
        g1, g2 = rng.uniform(0, 2 * np.pi, size=2)
        t1 = spin_tomogram(rho, 2, MeasurementDirection(theta, phi, g1))
        t2 = spin_tomogram(rho, 2, MeasurementDirection(theta, phi, g2))
        assert np.max(np.abs(t1 - t2)) < 1e-12
    fixed = spin_tomogram(rho, 2, MeasurementDirection(0.8, 0.3, 0.0))
    other = spin_tomogram(rho, 2, MeasurementDirection(0.8, 0.3, 1.7))
    assert np.max(np.abs(fixed - other)) < 1e-12


def test_local_tomogram_aligned_product():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0  # |up,up>
    joint = local_spin_tomogram(rho, (1, 1), MeasurementDirection(0.0), MeasurementDirection(0.0))
    expected = np.zeros((2, 2))
    expected[0, 0] = 1.0
    assert_allclose(joint, expected, atol=1e-15)


def test_local_tomogram_maximally_mixed(direction_factory):
    rng = np.random.default_rng(44)
    joint = local_spin_tomogram(
        np.eye(6) / 6.0, (1, 2), direction_factory(rng), direction_factory(rng)
    )
    assert_allclose(joint, np.full((2, 3), 1.0 / 6.0), atol=1e-14)


def test_local_tomogram_singlet_anticorrelation(direction_factory):
    rng = np.random.default_rng(45)
    singlet = werner_state(2, -1.0)
    for _ in range(10):
        direction = direction_factory(rng)
        joint = local_spin_tomogram(singlet, (1, 1), direction, direction)
        assert_allclose(joint, np.array([[0.0, 0.5], [0.5, 0.0]]), atol=1e-13)


def test_local_tomogram_product_factorizes(random_density, direction_factory):
    rng = np.random.default_rng(46)
    rho1 = random_density(rng, 2)
    rho2 = random_density(rng, 3)
    u1 = wigner_D(1, direction_factory(rng))
    u2 = wigner_D(2, direction_factory(rng))
    joint = local_unitary_tomogram(np.kron(rho1, rho2), u1, u2)
    product = np.outer(unitary_tomogram(rho1, u1), unitary_tomogram(rho2, u2))
    assert np.max(np.abs(joint - product)) < 1e-12


def test_local_tomogram_identity_reads_diagonal():
    diag = np.diag([0.4, 0.1, 0.2, 0.3]).astype(complex)
    joint = local_unitary_tomogram(diag, np.eye(2), np.eye(2))
    assert_allclose(joint, np.array([[0.4, 0.1], [0.2, 0.3]]))


def test_local_tomogram_mixture_linearity(random_density, direction_factory):
    # three-term separable mixture: tomogram is the weighted sum of products
    rng = np.random.default_rng(47)
    weights = np.array([0.5, 0.3, 0.2])
    parts = [(random_density(rng, 3), random_density(rng, 3)) for _ in range(3)]
    rho = sum(w * np.kron(r1, r2) for w, (r1, r2) in zip(weights, parts))
    u1 = wigner_D(2, direction_factory(rng))
    u2 = wigner_D(2, direction_factory(rng))
    joint = local_unitary_tomogram(rho, u1, u2)
    mixture = sum(
        w * np.outer(unitary_tomogram(r1, u1), unitary_tomogram(r2, u2))
        for w, (r1, r2) in zip(weights, parts)
    )
    assert np.max(np.abs(joint - mixture)) < 1e-12


def test_expectation_values():
    assert tomogram_expectation([0.5, 0.5], [1.0, -1.0]) == 0.0
    assert tomogram_expectation([1.0, 0.0], [1.0, -1.0]) == 1.0
    rng = np.random.default_rng(48)
    for _ in range(10):
        theta = rng.uniform(0, np.pi)
        probs = spin_tomogram(SPIN_UP, 1, MeasurementDirection(theta))
        assert tomogram_expectation(probs, [1.0, -1.0]) == pytest.approx(np.cos(theta), abs=1e-13)
    with pytest.raises(ValueError):
        tomogram_expectation([1.0, 0.0], [1.0, -1.0, 0.0])


def test_correlation_values(direction_factory):
    rng = np.random.default_rng(49)
    values = [1.0, -1.0]
    direction = direction_factory(rng)
    singlet_joint = local_spin_tomogram(werner_state(2, -1.0), (1, 1), direction, direction)
    assert correlation(singlet_joint, values, values) == pytest.approx(-1.0, abs=1e-12)
    mixed_joint = local_spin_tomogram(
        np.eye(4) / 4.0, (1, 1), direction_factory(rng), direction_factory(rng)
    )
    assert correlation(mixed_joint, values, values) == pytest.approx(0.0, abs=1e-13)
    up_up = np.zeros((4, 4), dtype=complex)
    up_up[0, 0] = 1.0
    aligned = local_spin_tomogram(up_up, (1, 1), MeasurementDirection(0.0), MeasurementDirection(0.0))
    assert correlation(aligned, values, values) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        correlation(np.ones((2, 3)) / 6.0, values, values)


def test_normalization_random_draws(random_density, direction_factory):
    rng = np.random.default_rng(50)
    for _ in range(200):
        rho = random_density(rng, 9)
        joint = local_spin_tomogram(rho, (2, 2), direction_factory(rng), direction_factory(rng))
        assert abs(joint.sum() - 1.0) < 1e-10
        assert joint.min() >= 0.0
        single = spin_tomogram(random_density(rng, 4), 3, direction_factory(rng))
        assert abs(single.sum() - 1.0) < 1e-10
        assert single.min() >= 0.0


def test_marginals_match_reduced_states(random_density, direction_factory):
    rng = np.random.default_rng(51)
    for _ in range(10):
        rho = random_density(rng, 6)
        d1, d2 = direction_factory(rng), direction_factory(rng)
        joint = local_spin_tomogram(rho, (1, 2), d1, d2)
        marg1 = spin_tomogram(partial_trace(rho, (2, 3), 0), 1, d1)
        marg2 = spin_tomogram(partial_trace(rho, (2, 3), 1), 2, d2)
        assert np.max(np.abs(joint.sum(axis=1) - marg1)) < 1e-10
        assert np.max(np.abs(joint.sum(axis=0) - marg2)) < 1e-10
