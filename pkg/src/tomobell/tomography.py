"""Tomographic probability distributions and their functionals.

A tomogram is the family of outcome distributions obtained by rotating a
state into every measurement basis: the unitary tomogram uses arbitrary
unitaries, the spin tomogram the irreducible SU(2) rotations from
:mod:`tomobell.wigner`.  Dichotomic outcome values default to (+1, -1)
in the descending-m index order.
"""

from __future__ import annotations

import numpy as np

from .linalg import TOL, as_complex_matrix
from .wigner import MeasurementDirection, wigner_D


def _check_unitary(u) -> np.ndarray:
    u = as_complex_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise ValueError(f"unitary must be square, got {u.shape}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > TOL.unitary:
        raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {dev:.3e})")
    return u


def _clamp_probabilities(probs: np.ndarray) -> np.ndarray:
    """Validate and clamp a probability array produced by a tomogram.

    Entries may undershoot zero by at most the roundoff floor; anything
    worse signals a real error upstream.  Valid entries are clamped to
    [0, 1] so downstream stochastic-matrix checks see exact nonnegativity.
    """
    if np.min(probs) < -TOL.prob_negative:
        raise ValueError(f"negative probability {np.min(probs):.3e} in tomogram")
    total = float(probs.sum())
    if abs(total - 1.0) > TOL.prob_sum:
        raise ValueError(f"tomogram probabilities sum to {total}, expected 1")
    return np.clip(probs, 0.0, 1.0)


def unitary_tomogram(rho, u) -> np.ndarray:
    """Outcome distribution <m| u^dag rho u |m> for a given basis u."""
    rho = as_complex_matrix(rho)
    u = _check_unitary(u)
    if u.shape[0] != rho.shape[0]:
        raise ValueError(f"dimension mismatch: state {rho.shape}, unitary {u.shape}")
    probs = np.einsum("im,ij,jm->m", u.conj(), rho, u).real
    return _clamp_probabilities(probs)


def spin_tomogram(rho, two_j, direction: MeasurementDirection) -> np.ndarray:
    """Spin tomogram along one polarization direction; independent of gamma."""
    rho = as_complex_matrix(rho)
    if rho.shape[0] != two_j + 1:
        raise ValueError(f"state dimension {rho.shape[0]} does not match two_j={two_j}")
    return unitary_tomogram(rho, wigner_D(two_j, direction))


def local_unitary_tomogram(rho, u1, u2) -> np.ndarray:
    """Joint outcome distribution under local bases u1 (x) u2, shape (d1, d2)."""
    rho = as_complex_matrix(rho)
    u1 = _check_unitary(u1)
    u2 = _check_unitary(u2)
    d1, d2 = u1.shape[0], u2.shape[0]
    if rho.shape[0] != d1 * d2:
        raise ValueError(
            f"state dimension {rho.shape[0]} does not factor as {d1} x {d2}"
        )
    r4 = rho.reshape(d1, d2, d1, d2)
    probs = np.einsum(
        "am,bn,abcd,cm,dn->mn", u1.conj(), u2.conj(), r4, u1, u2, optimize=True
    ).real
    return _clamp_probabilities(probs)


def local_spin_tomogram(
    rho,
    two_js: tuple[int, int],
    dir1: MeasurementDirection,
    dir2: MeasurementDirection,
) -> np.ndarray:
    """Joint spin tomogram for a spin-j1 (x) spin-j2 bipartite state."""
    two_j1, two_j2 = two_js
    return local_unitary_tomogram(rho, wigner_D(two_j1, dir1), wigner_D(two_j2, dir2))


def dichotomic_values(d: int = 2) -> np.ndarray:
    """Default outcome values: +1 for the first block index, -1 for the second."""
    if d != 2:
        raise ValueError("dichotomic values are defined for two outcomes")
    return np.array([1.0, -1.0])


def tomogram_expectation(probs, values) -> float:
    """Expectation sum_m x_m w(m) of an observable's eigenvalues over a tomogram."""
    probs = np.asarray(probs, dtype=float)
    values = np.asarray(values, dtype=float)
    if probs.shape != values.shape:
        raise ValueError(f"length mismatch: probs {probs.shape}, values {values.shape}")
    return float(probs @ values)


def correlation(joint, values1, values2) -> float:
    """Two-party correlation sum x_{m1} x_{m2} w(m1, m2)."""
    joint = np.asarray(joint, dtype=float)
    values1 = np.asarray(values1, dtype=float)
    values2 = np.asarray(values2, dtype=float)
    if joint.shape != (values1.size, values2.size):
        raise ValueError(
            f"shape mismatch: joint {joint.shape}, values {values1.size} x {values2.size}"
        )
    return float(values1 @ joint @ values2)
