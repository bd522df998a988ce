"""Derivative-free maximization of Bell functionals over measurement angles.

The search runs a multistart Nelder-Mead simplex over the 8 free Euler
angles (theta, phi per direction; gamma is irrelevant to tomograms and
pinned to 0).  All restarts, and for CHSH all portrait-partition pairs,
advance in lock step through one vectorized simplex engine, which keeps
the search deterministic and fast on small matrices.

Restart initial points form a fixed stream: first a coarse lattice over
the side-1/side-2 primary directions (secondary directions offset by
pi/2, the optimal CHSH arrangement), enumerated in digit-reversed order
so any prefix spreads over the whole grid; then points from a
counter-based Philox generator.  Truncating the stream to ``restarts``
points therefore yields monotone best values as restarts grow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bell import (
    BellEvaluation,
    BellFunctional,
    BellSettings,
    build_stochastic_matrix,
    chsh_value,
    i3_value,
    I3_PAIR_MASKS,
)
from .linalg import as_complex_matrix
from .portrait import enumerate_bipartitions
from .states import isotropic_state, werner_state
from .wigner import rotation_matrices, wrap_azimuthal, wrap_polar

_REFLECT = 1.0
_EXPAND = 2.0
_CONTRACT = 0.5
_SHRINK = 0.5
_SIMPLEX_STEP = 0.25


@dataclass(frozen=True)
class OptimizerConfig:
    """Multistart and simplex parameters; defaults suit the 8-angle problems."""

    restarts: int = 64
    seed: int = 0
    simplex_tolerance: float = 1e-8
    max_iterations: int = 2000
    coarse_grid_per_angle: int = 4

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1 or self.coarse_grid_per_angle < 1:
            raise ValueError("restarts, max_iterations, coarse_grid_per_angle must be positive")
        if self.simplex_tolerance <= 0:
            raise ValueError("simplex_tolerance must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")

    def with_restarts(self, restarts: int) -> "OptimizerConfig":
        return OptimizerConfig(
            restarts=restarts,
            seed=self.seed,
            simplex_tolerance=self.simplex_tolerance,
            max_iterations=self.max_iterations,
            coarse_grid_per_angle=self.coarse_grid_per_angle,
        )


@dataclass
class BellMaximum:
    """Best evaluation found, with per-restart convergence data."""

    best: BellEvaluation
    evaluations_used: int
    per_restart_values: np.ndarray = field(default_factory=lambda: np.array([]))


class BracketError(ValueError):
    """Threshold bracket does not straddle the classical bound."""


def _nelder_mead_batch(fn, x0, tol, max_iter, step=_SIMPLEX_STEP):
    """Lock-step Nelder-Mead minimization of a batch of starts.

    fn(points, rows) evaluates points (M, n) belonging to batch rows
    (M,) and returns values (M,).  Each batch member runs the standard
    reflection/expansion/contraction/shrink simplex with coefficients
    (1, 2, 0.5, 0.5) until its value spread drops below ``tol`` or the
    shared iteration budget runs out.  Returns (x_best, f_best, evals).
    """
    x0 = np.asarray(x0, dtype=float)
    n_batch, n = x0.shape
    simplex = np.repeat(x0[:, None, :], n + 1, axis=1)
    diag = np.arange(n)
    simplex[:, 1:, :][:, diag, diag] += step
    rows0 = np.repeat(np.arange(n_batch), n + 1)
    f = fn(simplex.reshape(-1, n), rows0).reshape(n_batch, n + 1)
    f = np.where(np.isfinite(f), f, np.inf)
    evals = n_batch * (n + 1)

    for _ in range(max_iter):
        order = np.argsort(f, axis=1, kind="stable")
        f = np.take_along_axis(f, order, axis=1)
        simplex = np.take_along_axis(simplex, order[:, :, None], axis=1)
        with np.errstate(invalid="ignore"):
            spread = f[:, -1] - f[:, 0]
        active = ~(spread < tol)  # NaN spread (all-inf row) stays active but is harmless
        active &= np.isfinite(f[:, 0])
        if not active.any():
            break
        act = np.where(active)[0]

        centroid = simplex[act, :-1, :].mean(axis=1)
        worst = simplex[act, -1, :]
        f_best = f[act, 0]
        f_second = f[act, -2]
        f_worst = f[act, -1]

        x_reflect = centroid + _REFLECT * (centroid - worst)
        f_reflect = fn(x_reflect, act)
        f_reflect = np.where(np.isfinite(f_reflect), f_reflect, np.inf)
        evals += len(act)

        expand_m = f_reflect < f_best
        accept_m = ~expand_m & (f_reflect < f_second)
        out_contract_m = ~expand_m & ~accept_m & (f_reflect < f_worst)
        in_contract_m = ~expand_m & ~accept_m & ~out_contract_m

        candidate = np.empty_like(x_reflect)
        candidate[expand_m] = centroid[expand_m] + _EXPAND * (
            x_reflect[expand_m] - centroid[expand_m]
        )
        candidate[out_contract_m] = centroid[out_contract_m] + _CONTRACT * (
            x_reflect[out_contract_m] - centroid[out_contract_m]
        )
        candidate[in_contract_m] = centroid[in_contract_m] + _CONTRACT * (
            worst[in_contract_m] - centroid[in_contract_m]
        )
        need = expand_m | out_contract_m | in_contract_m
        f_cand = np.full(len(act), np.inf)
        if need.any():
            vals = fn(candidate[need], act[need])
            f_cand[need] = np.where(np.isfinite(vals), vals, np.inf)
            evals += int(need.sum())

        new_x = x_reflect.copy()
        new_f = f_reflect.copy()
        take = expand_m & (f_cand < f_reflect)
        take |= out_contract_m & (f_cand <= f_reflect)
        take |= in_contract_m & (f_cand < f_worst)
        new_x[take] = candidate[take]
        new_f[take] = f_cand[take]
        shrink = (out_contract_m | in_contract_m) & ~take

        keep = ~shrink
        rows_keep = act[keep]
        simplex[rows_keep, -1, :] = new_x[keep]
        f[rows_keep, -1] = new_f[keep]

        if shrink.any():
            rows_s = act[shrink]
            best_vertex = simplex[rows_s, :1, :]
            shrunk = best_vertex + _SHRINK * (simplex[rows_s, 1:, :] - best_vertex)
            simplex[rows_s, 1:, :] = shrunk
            vals = fn(shrunk.reshape(-1, n), np.repeat(rows_s, n))
            f[rows_s, 1:] = np.where(np.isfinite(vals), vals, np.inf).reshape(-1, n)
            evals += shrunk.shape[0] * n

    order = np.argsort(f, axis=1, kind="stable")
    f = np.take_along_axis(f, order, axis=1)
    simplex = np.take_along_axis(simplex, order[:, :, None], axis=1)
    return simplex[:, 0, :], f[:, 0], evals


def nelder_mead(objective, x0, cfg: OptimizerConfig, wrap=None):
    """Maximize a scalar objective from one start point.

    ``objective`` maps a real vector to a real; ``wrap`` (optional) folds
    coordinates into their domain before each call.  Returns (x, value).
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))

    def fn(points, rows):
        out = np.empty(len(points))
        for i, point in enumerate(points):
            value = objective(wrap(point) if wrap is not None else point)
            if not np.isfinite(value):
                raise ValueError(f"objective returned non-finite value {value} at {point}")
            out[i] = -value
        return out

    x_best, f_best, _ = _nelder_mead_batch(
        fn, x0[None, :], cfg.simplex_tolerance, cfg.max_iterations
    )
    x = wrap(x_best[0]) if wrap is not None else x_best[0]
    return x, -float(f_best[0])


def wrap_angle_vector(x):
    """Fold an (..., 8) angle vector: thetas into [0, pi], phis into [0, 2pi)."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    out[..., 0::2] = wrap_polar(x[..., 0::2])
    out[..., 1::2] = wrap_azimuthal(x[..., 1::2])
    return out


def _start_points(cfg: OptimizerConfig, count: int) -> np.ndarray:
    """First ``count`` points of the deterministic restart stream."""
    g = cfg.coarse_grid_per_angle
    lattice_size = g**4
    theta_grid = (np.arange(g) + 0.5) * np.pi / g
    phi_grid = (np.arange(g) + 0.5) * 2.0 * np.pi / g
    points = np.empty((count, 8))
    for k in range(min(count, lattice_size)):
        idx = k
        digits = []
        for _ in range(4):
            digits.append(idx % g)
            idx //= g
        ta, pa = theta_grid[digits[0]], phi_grid[digits[1]]
        tb, pb = theta_grid[digits[2]], phi_grid[digits[3]]
        # Secondary settings offset by a quarter turn: the optimal CHSH
        # arrangement when the primary pair is pi/4 apart.
        points[k] = (ta, pa, tb, pb, tb - np.pi / 2.0, pb, ta + np.pi / 2.0, pa)
    if count > lattice_size:
        rng = np.random.Generator(np.random.Philox(key=cfg.seed))
        u = rng.random((count - lattice_size, 8))
        u[:, 0::2] *= np.pi
        u[:, 1::2] *= 2.0 * np.pi
        points[lattice_size:] = u
    return points


def _chsh_objective(rho, two_js, eps1, eps2):
    """Batched negative-CHSH objective; rows select the partition signs."""
    two_j1, two_j2 = two_js
    d1, d2 = two_j1 + 1, two_j2 + 1
    rho4 = as_complex_matrix(rho).reshape(d1, d2, d1, d2)

    def fn(x, rows):
        x = wrap_angle_vector(x)
        theta = x[:, 0::2]
        phi = x[:, 1::2]
        # angle columns are (a, b, c, d); side 1 measures a and d, side 2 b and c
        rot1 = rotation_matrices(two_j1, theta[:, [0, 3]], phi[:, [0, 3]])
        rot2 = rotation_matrices(two_j2, theta[:, [1, 2]], phi[:, [1, 2]])
        e1 = eps1[rows]
        e2 = eps2[rows]
        obs1 = np.einsum("bsim,bm,bsjm->bsij", rot1, e1, rot1.conj(), optimize=True)
        obs2 = np.einsum("bsim,bm,bsjm->bsij", rot2, e2, rot2.conj(), optimize=True)
        corr = np.einsum("pqrs,burp,bvsq->buv", rho4, obs1, obs2, optimize=True).real
        value = np.abs(corr[:, 0, 0] + corr[:, 0, 1] + corr[:, 1, 0] - corr[:, 1, 1])
        return -value

    return fn


def _i3_objective(rho):
    """Batched negative-I3 objective for a two-qutrit state."""
    rho4 = as_complex_matrix(rho).reshape(3, 3, 3, 3)
    kernel = np.empty((2, 2, 3, 3))
    kernel[0, 0] = I3_PAIR_MASKS[0]  # (a, b)
    kernel[1, 0] = I3_PAIR_MASKS[1]  # (c, b)
    kernel[1, 1] = I3_PAIR_MASKS[2]  # (c, d)
    kernel[0, 1] = I3_PAIR_MASKS[3]  # (a, d)

    def fn(x, rows):
        x = wrap_angle_vector(x)
        theta = x[:, 0::2]
        phi = x[:, 1::2]
        # side 1 measures a and c, side 2 b and d
        rot1 = rotation_matrices(2, theta[:, [0, 2]], phi[:, [0, 2]])
        rot2 = rotation_matrices(2, theta[:, [1, 3]], phi[:, [1, 3]])
        g1 = np.einsum("bupm,burm->bumpr", rot1.conj(), rot1, optimize=True)
        g2 = np.einsum("bvqn,bvsn->bvnqs", rot2.conj(), rot2, optimize=True)
        joints = np.einsum("bumpr,bvnqs,pqrs->buvmn", g1, g2, rho4, optimize=True).real
        return -np.einsum("buvmn,uvmn->b", joints, kernel)

    return fn


def _reduce_batch(values, angles, labels):
    """Pick the best row: greatest value, ties to the smallest angle vector."""
    best_idx = None
    best_value = -np.inf
    best_angles = None
    for idx in range(len(values)):
        v = values[idx]
        a = tuple(angles[idx])
        if v > best_value or (v == best_value and (best_angles is None or a < best_angles)):
            best_idx, best_value, best_angles = idx, v, a
    return best_idx, best_value, labels[best_idx]


def maximize_chsh(rho, two_js, cfg: OptimizerConfig = OptimizerConfig()) -> BellMaximum:
    """Maximize the portrait CHSH value over angles and partition pairs.

    Every pair from the canonical bipartition lists of the two subsystems
    is searched with the full restart stream; the reported maximum is
    re-evaluated through the stochastic-matrix path as a consistency
    guard.  Deterministic for a fixed (state, cfg).
    """
    rho = as_complex_matrix(rho)
    two_j1, two_j2 = two_js
    d1, d2 = two_j1 + 1, two_j2 + 1
    if rho.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"state shape {rho.shape} does not match dims {d1} x {d2}")
    pairs = [
        (p1, p2)
        for p1 in enumerate_bipartitions(d1)
        for p2 in enumerate_bipartitions(d2)
    ]
    n_pairs = len(pairs)
    restarts = cfg.restarts
    starts = _start_points(cfg, restarts)
    x0 = np.tile(starts, (n_pairs, 1))
    eps1 = np.repeat(np.array([p1.sign_vector() for p1, _ in pairs]), restarts, axis=0)
    eps2 = np.repeat(np.array([p2.sign_vector() for _, p2 in pairs]), restarts, axis=0)

    fn = _chsh_objective(rho, two_js, eps1, eps2)
    x_best, f_best, evals = _nelder_mead_batch(
        fn, x0, cfg.simplex_tolerance, cfg.max_iterations
    )
    values = -f_best
    angles = wrap_angle_vector(x_best)
    labels = [pairs[i // restarts] for i in range(n_pairs * restarts)]

    idx, best_value, best_parts = _reduce_batch(values, angles, labels)
    settings = BellSettings.from_angles(angles[idx])

    check = chsh_value(build_stochastic_matrix(rho, two_js, settings, best_parts))
    if abs(check - best_value) > 1e-9:
        raise RuntimeError(
            f"fast objective ({best_value}) disagrees with stochastic-matrix value ({check})"
        )

    best = BellEvaluation(
        value=best_value,
        settings=settings,
        functional=BellFunctional.CHSH,
        partitions=best_parts,
    )
    per_restart = values.reshape(n_pairs, restarts).max(axis=0)
    return BellMaximum(best=best, evaluations_used=evals, per_restart_values=per_restart)


def maximize_i3(rho, cfg: OptimizerConfig = OptimizerConfig()) -> BellMaximum:
    """Maximize the two-qutrit I3 functional over the 8 measurement angles."""
    rho = as_complex_matrix(rho)
    if rho.shape != (9, 9):
        raise ValueError(f"I3 needs a two-qutrit (9x9) state, got {rho.shape}")
    starts = _start_points(cfg, cfg.restarts)
    fn = _i3_objective(rho)
    x_best, f_best, evals = _nelder_mead_batch(
        fn, starts, cfg.simplex_tolerance, cfg.max_iterations
    )
    values = -f_best
    angles = wrap_angle_vector(x_best)
    labels = [None] * len(values)
    idx, best_value, _ = _reduce_batch(values, angles, labels)
    settings = BellSettings.from_angles(angles[idx])

    check = i3_value(rho, settings)
    if abs(check - best_value) > 1e-9:
        raise RuntimeError(
            f"fast objective ({best_value}) disagrees with i3_value ({check})"
        )

    best = BellEvaluation(
        value=best_value,
        settings=settings,
        functional=BellFunctional.I3,
        partitions=None,
    )
    return BellMaximum(best=best, evaluations_used=evals, per_restart_values=values)


def _family_state(family: str, d: int, param: float):
    if family == "werner":
        return werner_state(d, param)
    if family == "isotropic":
        return isotropic_state(d, param)
    raise ValueError(f"unknown state family '{family}'")


def maximize_functional(rho, two_js, functional, cfg: OptimizerConfig) -> BellMaximum:
    """Dispatch to the CHSH or I3 maximizer."""
    functional = BellFunctional(functional)
    if functional is BellFunctional.CHSH:
        return maximize_chsh(rho, two_js, cfg)
    if two_js != (2, 2):
        raise ValueError("the I3 functional is defined for two qutrits only")
    return maximize_i3(rho, cfg)


def find_threshold(
    family: str,
    d: int,
    functional,
    cfg: OptimizerConfig = OptimizerConfig(),
    bracket: tuple[float, float] = None,
    tol: float = 1e-4,
) -> float:
    """Locate the state parameter where the maximized functional crosses 2.

    Bisects the bracket, re-running the full maximization at each step;
    exactly one endpoint must violate the classical bound.  Near-bound
    values (within 1e-6 of 2) are re-resolved with 4x the restarts before
    their sign is trusted.
    """
    if bracket is None:
        bracket = (-1.0, 0.0) if family == "werner" else (0.5, 1.0)
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"bracket must be increasing, got ({lo}, {hi})")
    two_js = (d - 1, d - 1)

    def bell_max(param: float) -> float:
        value = maximize_functional(
            _family_state(family, d, param), two_js, functional, cfg
        ).best.value
        if abs(value - 2.0) <= 1e-6:
            value = maximize_functional(
                _family_state(family, d, param),
                two_js,
                functional,
                cfg.with_restarts(4 * cfg.restarts),
            ).best.value
        return value

    value_lo = bell_max(lo)
    value_hi = bell_max(hi)
    lo_violates = value_lo > 2.0
    hi_violates = value_hi > 2.0
    if lo_violates == hi_violates:
        raise BracketError(
            f"bracket endpoints do not straddle the bound: "
            f"B*({lo}) = {value_lo}, B*({hi}) = {value_hi}"
        )

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        mid_violates = bell_max(mid) > 2.0
        if mid_violates == lo_violates:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
