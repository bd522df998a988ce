"""Wigner rotation matrices for arbitrary spin j.

Half-integer spins and magnetic quantum numbers are carried as doubled
integers (``two_j``, ``two_m``) so that index arithmetic stays exact.
Basis convention throughout: row/column index 0 corresponds to m = +j,
index 2j to m = -j (descending m).

The small d-matrix is evaluated from the closed formula

    d^j_{m'm}(theta) = sqrt[(j+m)!(j-m)! / ((j+m')!(j-m')!)]
                       * sin(theta/2)^(m-m') * cos(theta/2)^(m+m')
                       * P_{j-m}^{(m-m', m+m')}(cos theta)

which is well defined only where m-m' >= 0 and m+m' >= 0; the remaining
entries follow from the symmetries

    d^j_{m'm} = (-1)^{m-m'} d^j_{mm'} = d^j_{-m,-m'}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def wrap_polar(theta):
    """Fold a polar angle into [0, pi] (mod 2pi, then reflect)."""
    t = np.mod(theta, 2.0 * np.pi)
    return np.where(t > np.pi, 2.0 * np.pi - t, t)


def wrap_azimuthal(phi):
    """Wrap an azimuthal angle into [0, 2pi)."""
    return np.mod(phi, 2.0 * np.pi)


@dataclass(frozen=True)
class MeasurementDirection:
    """Euler angles (theta, phi, gamma) selecting a rotated measurement basis.

    Angles are wrapped on construction: theta into [0, pi], phi and gamma
    into [0, 2pi).  The third angle gamma never affects tomographic
    probabilities and defaults to 0.
    """

    theta: float
    phi: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", float(wrap_polar(self.theta)))
        object.__setattr__(self, "phi", float(wrap_azimuthal(self.phi)))
        object.__setattr__(self, "gamma", float(wrap_azimuthal(self.gamma)))

    @property
    def unit_vector(self) -> np.ndarray:
        """Bloch-sphere direction (sin t cos p, sin t sin p, cos t)."""
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )


def jacobi_polynomial(n, alpha, beta, x):
    """Jacobi polynomial P_n^{(alpha,beta)}(x) by three-term recurrence.

    Accepts scalar or ndarray x; alpha and beta are integers >= 0 here.
    """
    if n < 0:
        raise ValueError("polynomial degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p_curr = (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0
    for k in range(2, n + 1):
        c1 = 2.0 * k * (k + alpha + beta) * (2.0 * k + alpha + beta - 2.0)
        c2a = (2.0 * k + alpha + beta) * (2.0 * k + alpha + beta - 2.0)
        c2b = alpha * alpha - beta * beta
        c2 = (2.0 * k + alpha + beta - 1.0) * (c2a * x + c2b)
        c3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + alpha + beta)
        p_curr, p_prev = (c2 * p_curr - c3 * p_prev) / c1, p_curr
    return p_curr if p_curr.ndim else float(p_curr)


@lru_cache(maxsize=None)
def _small_d_plan(two_j):
    """Per-entry evaluation plan for the (2j+1)x(2j+1) small d-matrix.

    Every entry is mapped into the directly evaluable region
    (m-m' >= 0, m+m' >= 0) through the symmetry relations; the plan stores
    the resulting coefficient, half-angle exponents and Jacobi indices.
    """
    if two_j < 0:
        raise ValueError("two_j must be nonnegative")
    dim = two_j + 1
    rows, cols, coefs = [], [], []
    sin_exps, cos_exps, degrees, alphas, betas = [], [], [], [], []
    for r in range(dim):
        for c in range(dim):
            tm_row = two_j - 2 * r   # doubled m'
            tm_col = two_j - 2 * c   # doubled m
            s2 = tm_col - tm_row     # doubled (m - m')
            t2 = tm_col + tm_row     # doubled (m + m')
            sign = 1.0
            if s2 >= 0 and t2 >= 0:
                src_row, src_col = tm_row, tm_col
            elif s2 < 0 and t2 >= 0:
                src_row, src_col = tm_col, tm_row
                sign = -1.0 if ((-s2) // 2) % 2 else 1.0
            elif s2 >= 0 and t2 < 0:
                src_row, src_col = -tm_col, -tm_row
            else:
                src_row, src_col = -tm_row, -tm_col
                sign = -1.0 if ((-s2) // 2) % 2 else 1.0
            alpha = (src_col - src_row) // 2
            beta = (src_col + src_row) // 2
            degree = (two_j - src_col) // 2
            pref = math.sqrt(
                math.factorial((two_j + src_col) // 2)
                * math.factorial((two_j - src_col) // 2)
                / (
                    math.factorial((two_j + src_row) // 2)
                    * math.factorial((two_j - src_row) // 2)
                )
            )
            rows.append(r)
            cols.append(c)
            coefs.append(sign * pref)
            sin_exps.append(alpha)
            cos_exps.append(beta)
            degrees.append(degree)
            alphas.append(alpha)
            betas.append(beta)
    return (
        np.array(rows),
        np.array(cols),
        np.array(coefs),
        np.array(sin_exps),
        np.array(cos_exps),
        np.array(degrees),
        np.array(alphas),
        np.array(betas),
    )


def wigner_small_d_matrix(two_j, theta):
    """Full real small d-matrix d^j(theta).

    ``theta`` may be a scalar or an ndarray; the matrix axes are appended
    last, so an input of shape (...,) yields shape (..., 2j+1, 2j+1).
    """
    rows, cols, coefs, sin_exps, cos_exps, degrees, alphas, betas = _small_d_plan(two_j)
    theta = np.asarray(theta, dtype=float)
    scalar = theta.ndim == 0
    t = np.atleast_1d(theta)
    x = np.cos(t)
    sh = np.sin(t / 2.0)
    ch = np.cos(t / 2.0)

    vals = coefs * sh[..., None] ** sin_exps * ch[..., None] ** cos_exps
    jac = np.empty_like(vals)
    for key in {(int(n), int(a), int(b)) for n, a, b in zip(degrees, alphas, betas)}:
        n, a, b = key
        mask = (degrees == n) & (alphas == a) & (betas == b)
        jac[..., mask] = np.asarray(jacobi_polynomial(n, a, b, x))[..., None]
    vals = vals * jac

    dim = two_j + 1
    d = np.zeros(t.shape + (dim, dim))
    d[..., rows, cols] = vals
    return d[0] if scalar else d


def wigner_small_d(two_j, two_m_row, two_m_col, theta) -> float:
    """Single element d^j_{m'm}(theta) with doubled half-integer indices."""
    for two_m in (two_m_row, two_m_col):
        if abs(two_m) > two_j or (two_j - two_m) % 2 != 0:
            raise ValueError(
                f"invalid magnetic number two_m={two_m} for two_j={two_j}"
            )
    r = (two_j - two_m_row) // 2
    c = (two_j - two_m_col) // 2
    return float(wigner_small_d_matrix(two_j, float(theta))[r, c])


def _magnetic_numbers(two_j) -> np.ndarray:
    """Doubled m values in row order (+j first)."""
    return two_j - 2 * np.arange(two_j + 1)


def rotation_matrices(two_j, theta, phi):
    """Batch of rotation matrices with gamma = 0.

    theta, phi: broadcastable float arrays of shape (...,); returns a
    complex array of shape (..., 2j+1, 2j+1).  This is the hot path used
    by the Bell-functional optimizer; tomographic probabilities do not
    depend on gamma, so it is pinned to zero here.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    d = wigner_small_d_matrix(two_j, theta)
    half_m = _magnetic_numbers(two_j) / 2.0
    row_phase = np.exp(-1j * phi[..., None] * half_m)
    return row_phase[..., :, None] * d


def wigner_D(two_j, direction: MeasurementDirection) -> np.ndarray:
    """Unitary rotation matrix <m'|D|m> = e^{-i m' phi} d^j_{m'm}(theta) e^{-i m gamma}."""
    d = wigner_small_d_matrix(two_j, direction.theta)
    half_m = _magnetic_numbers(two_j) / 2.0
    row_phase = np.exp(-1j * direction.phi * half_m)
    col_phase = np.exp(-1j * direction.gamma * half_m)
    return row_phase[:, None] * d * col_phase[None, :]


def spin_operator_y(two_j) -> np.ndarray:
    """Angular momentum operator J_y = (J_+ - J_-) / 2i, same index order as wigner_D."""
    dim = two_j + 1
    j = two_j / 2.0
    j_plus = np.zeros((dim, dim), dtype=complex)
    for idx in range(1, dim):
        m = (two_j - 2 * idx) / 2.0  # raise from m to m+1: row idx-1, col idx
        j_plus[idx - 1, idx] = math.sqrt(j * (j + 1.0) - m * (m + 1.0))
    j_minus = j_plus.conj().T
    return (j_plus - j_minus) / 2j
