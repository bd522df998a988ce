"""Bipartite state families and density-matrix plumbing.

Provides the Werner and isotropic one-parameter families, the flip
operator, maximally entangled vectors, purity, separability thresholds,
and a plain-text density-matrix file format shared with the CLI.
"""

from __future__ import annotations

import numpy as np

from .linalg import TOL, as_complex_matrix

INVARIANT_HERMITIAN = "hermitian"
INVARIANT_UNIT_TRACE = "unit trace"
INVARIANT_PSD = "positive semidefinite"


class InvariantViolation(ValueError):
    """A density matrix failed one of its defining invariants."""

    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        super().__init__(f"density-matrix invariant '{invariant}' violated: {detail}")


def validate_density_matrix(rho, dim: int | None = None) -> np.ndarray:
    """Check Hermiticity, unit trace, and positivity; return the matrix.

    Raises InvariantViolation naming the first failed invariant.
    """
    rho = as_complex_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {rho.shape[0]}")
    herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_dev > TOL.hermitian:
        raise InvariantViolation(INVARIANT_HERMITIAN, f"max |rho - rho^dag| = {herm_dev:.3e}")
    trace_dev = abs(complex(np.trace(rho)) - 1.0)
    if trace_dev > TOL.trace_one:
        raise InvariantViolation(INVARIANT_UNIT_TRACE, f"|tr(rho) - 1| = {trace_dev:.3e}")
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < -TOL.psd:
        raise InvariantViolation(INVARIANT_PSD, f"min eigenvalue = {min_eig:.3e}")
    return rho


def flip_operator(d: int) -> np.ndarray:
    """Swap operator V with V|i>|j> = |j>|i> on a d x d bipartite space."""
    if d < 2:
        raise ValueError("flip operator needs subsystem dimension >= 2")
    v = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            v[j * d + i, i * d + j] = 1.0
    return v


def max_entangled(d: int) -> np.ndarray:
    """Maximally entangled vector sum_i |ii> / sqrt(d), length d^2."""
    if d < 2:
        raise ValueError("maximally entangled vector needs dimension >= 2")
    psi = np.zeros(d * d, dtype=complex)
    psi[:: d + 1] = 1.0 / np.sqrt(d)
    return psi


def werner_state(d: int, f: float) -> np.ndarray:
    """Werner family W = [(d - f) I + (d f - 1) V] / (d^3 - d), f in [-1, 1].

    The parameter f is the flip expectation tr(W V).
    """
    if not -1.0 <= f <= 1.0:
        raise ValueError(f"Werner parameter must lie in [-1, 1], got {f}")
    eye = np.eye(d * d, dtype=complex)
    w = ((d - f) * eye + (d * f - 1.0) * flip_operator(d)) / (d**3 - d)
    return validate_density_matrix(w)


def isotropic_state(d: int, p: float) -> np.ndarray:
    """Isotropic family S = [(1 - p) I + (p d^2 - 1) |psi><psi|] / (d^2 - 1).

    The parameter p is the fidelity <psi|S|psi> with the maximally
    entangled |psi>.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"isotropic parameter must lie in [0, 1], got {p}")
    psi = max_entangled(d)
    proj = np.outer(psi, psi.conj())
    eye = np.eye(d * d, dtype=complex)
    s = ((1.0 - p) * eye + (p * d * d - 1.0) * proj) / (d * d - 1.0)
    return validate_density_matrix(s)


def purity(rho) -> float:
    """tr(rho^2), between 1/dim and 1."""
    rho = as_complex_matrix(rho)
    return float(np.trace(rho @ rho).real)


def separability_threshold(family: str, d: int) -> float:
    """Parameter value separating separable from entangled states.

    Werner states are separable iff f >= 0; isotropic states iff p <= 1/d.
    """
    if family == "werner":
        return 0.0
    if family == "isotropic":
        return 1.0 / d
    raise ValueError(f"unknown state family '{family}'")


def is_separable_parameter(family: str, d: int, param: float) -> bool:
    """Whether the family member at this parameter is separable."""
    threshold = separability_threshold(family, d)
    if family == "werner":
        return param >= threshold
    return param <= threshold


def singlet_fraction(p: float) -> float:
    """Mixing weight q of the pure part of a two-qutrit isotropic state.

    Writing the state as q |psi><psi| + (1 - q) I/9 gives fidelity
    p = (8q + 1)/9, hence q = (9p - 1)/8.  Defined for p in [1/9, 1].
    """
    if p < 1.0 / 9.0 - 1e-12:
        raise ValueError(f"fidelity {p} below 1/9 has no mixing-weight form")
    return (9.0 * p - 1.0) / 8.0


def partial_trace(rho, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Reduced state of subsystem ``keep`` (0 or 1) of a bipartite matrix."""
    d1, d2 = dims
    rho = as_complex_matrix(rho)
    if rho.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"shape {rho.shape} does not match dims {dims}")
    r = rho.reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("ikjk->ij", r)
    if keep == 1:
        return np.einsum("kikj->ij", r)
    raise ValueError("keep must be 0 or 1")


def save_density_matrix(path, rho, dims: tuple[int, int]) -> None:
    """Write a density matrix as 'dim <d1> <d2>' plus one '<re> <im>' line per entry."""
    d1, d2 = dims
    rho = as_complex_matrix(rho)
    if rho.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"shape {rho.shape} does not match dims {dims}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"dim {d1} {d2}\n")
        for z in rho.reshape(-1):
            fh.write(f"{z.real:.17g} {z.imag:.17g}\n")


def load_density_matrix(path) -> tuple[np.ndarray, tuple[int, int]]:
    """Parse the density-matrix file format and validate all invariants."""
    with open(path, encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty density-matrix file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "dim":
        raise ValueError(f"{path}: first line must be 'dim <d1> <d2>', got {lines[0]!r}")
    try:
        d1, d2 = int(head[1]), int(head[2])
    except ValueError:
        raise ValueError(f"{path}: non-integer dimensions in {lines[0]!r}") from None
    if d1 < 1 or d2 < 1:
        raise ValueError(f"{path}: dimensions must be positive, got {d1} x {d2}")
    n = d1 * d2
    if len(lines) - 1 != n * n:
        raise ValueError(f"{path}: expected {n * n} entry lines, found {len(lines) - 1}")
    entries = np.empty(n * n, dtype=complex)
    for k, ln in enumerate(lines[1:]):
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: line {k + 2} must be '<re> <im>', got {ln!r}")
        try:
            entries[k] = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise ValueError(f"{path}: non-numeric value on line {k + 2}: {ln!r}") from None
    rho = validate_density_matrix(entries.reshape(n, n))
    return rho, (d1, d2)
