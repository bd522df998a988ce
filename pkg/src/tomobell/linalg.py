"""Dense complex matrix helpers shared by every other module.

All operators in this package are small (at most 9x9), dense, complex
numpy arrays.  The helpers here wrap numpy with the argument checks the
rest of the library relies on, plus a self-contained matrix-exponential
used to cross-validate rotation matrices in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances used across the package."""

    hermitian: float = 1e-10       # max |H - H^dag| accepted as Hermitian
    antihermitian: float = 1e-10   # max |A + A^dag| accepted as anti-Hermitian
    unitary: float = 1e-10         # max |U^dag U - I| accepted as unitary
    trace_one: float = 1e-10       # |tr(rho) - 1| accepted as unit trace
    psd: float = 1e-10             # eigenvalues >= -psd accepted as PSD
    prob_negative: float = 1e-12   # probabilities >= -prob_negative, clamped to 0
    prob_sum: float = 1e-10        # |sum(probs) - 1| accepted as normalized
    series_cutoff: float = 1e-16   # exponential series truncation threshold


TOL = Tolerances()


def as_complex_matrix(a) -> np.ndarray:
    """Coerce input to a 2-D complex ndarray."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def tensor(a, b) -> np.ndarray:
    """Tensor (Kronecker) product with the first factor as the slow index.

    Element ((i1*rB + i2), (j1*cB + j2)) equals A[i1, j1] * B[i2, j2].
    """
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_complex_matrix(a).conj().T


def multiply(a, b) -> np.ndarray:
    """Matrix product with an explicit conformability check."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def trace(a) -> complex:
    """Trace of a square matrix."""
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"trace requires a square matrix, got {a.shape}")
    return complex(np.trace(a))


def hermitian_eigenvalues(h, tol: Tolerances = TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending.

    Rejects inputs whose anti-Hermitian part exceeds the tolerance.
    """
    h = as_complex_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got {h.shape}")
    dev = np.max(np.abs(h - h.conj().T))
    if dev > tol.hermitian:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return np.linalg.eigvalsh(h)


def exp_antihermitian(a, tol: Tolerances = TOL) -> np.ndarray:
    """Unitary exponential of an anti-Hermitian matrix, by power series.

    Independent of any eigensolver or library expm so it can serve as a
    cross-check for rotation matrices built elsewhere.  Uses scaling and
    squaring when the 1-norm exceeds 1; the series stops once the next
    term's largest entry drops below the configured cutoff.
    """
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got {a.shape}")
    dev = np.max(np.abs(a + a.conj().T))
    if dev > tol.antihermitian:
        raise ValueError(f"matrix is not anti-Hermitian (max deviation {dev:.3e})")

    n = a.shape[0]
    norm1 = float(np.max(np.abs(a).sum(axis=0))) if n else 0.0
    squarings = max(0, math.ceil(math.log2(norm1))) if norm1 > 1.0 else 0
    scaled = a / (2 ** squarings)

    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    k = 1
    while True:
        term = term @ scaled / k
        if np.max(np.abs(term)) < tol.series_cutoff:
            break
        result = result + term
        k += 1
        if k > 1000:
            raise RuntimeError("exponential series failed to converge")
    for _ in range(squarings):
        result = result @ result
    return result
