"""CHSH machinery on stochastic matrices, and the two-qutrit I3 functional.

Four joint outcome distributions, one per CHSH setting pair, form the
columns of a 4x4 column-stochastic matrix M; the CHSH combination is
|tr(I M)| with the fixed sign kernel I below.  Column order is
(a,b), (a,c), (d,b), (d,c) with settings a, d on side 1 and b, c on
side 2; row order is (+,+), (+,-), (-,+), (-,-).

The I3 functional uses a different, fixed pairing: its four tomograms
are taken at (a,b), (c,b), (c,d), (a,d) with a, c on side 1 and b, d on
side 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import TOL, as_complex_matrix
from .portrait import two_qubit_portrait
from .tomography import local_spin_tomogram
from .wigner import MeasurementDirection

CHSH_KERNEL = np.array(
    [
        [1.0, -1.0, -1.0, 1.0],
        [1.0, -1.0, -1.0, 1.0],
        [1.0, -1.0, -1.0, 1.0],
        [-1.0, 1.0, 1.0, -1.0],
    ]
)

CHSH_CLASSICAL_BOUND = 2.0
I3_CLASSICAL_BOUND = 2.0


class BellFunctional(str, Enum):
    CHSH = "chsh"
    I3 = "i3"


@dataclass(frozen=True)
class BellSettings:
    """The four measurement directions entering a Bell functional."""

    dir_a: MeasurementDirection
    dir_b: MeasurementDirection
    dir_c: MeasurementDirection
    dir_d: MeasurementDirection

    @classmethod
    def from_angles(cls, angles) -> "BellSettings":
        """Build from the flat vector (ta, pa, tb, pb, tc, pc, td, pd)."""
        angles = np.asarray(angles, dtype=float)
        if angles.shape != (8,):
            raise ValueError(f"expected 8 angles, got shape {angles.shape}")
        dirs = [MeasurementDirection(angles[2 * k], angles[2 * k + 1]) for k in range(4)]
        return cls(*dirs)

    def angles(self) -> np.ndarray:
        out = []
        for d in (self.dir_a, self.dir_b, self.dir_c, self.dir_d):
            out.extend([d.theta, d.phi])
        return np.array(out)


@dataclass
class BellEvaluation:
    """One evaluated Bell functional: its value, settings, and portraits."""

    value: float
    settings: BellSettings
    functional: BellFunctional
    partitions: tuple | None = None


def validate_stochastic_matrix(m) -> np.ndarray:
    """Clamp roundoff negatives and check every column sums to 1."""
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
    if np.min(m) < -TOL.prob_negative:
        raise ValueError(f"negative entry {np.min(m):.3e} in stochastic matrix")
    sums = m.sum(axis=0)
    if np.max(np.abs(sums - 1.0)) > TOL.prob_sum:
        raise ValueError(f"column sums {sums} deviate from 1")
    return np.clip(m, 0.0, None)


def build_stochastic_matrix(rho, two_js, settings: BellSettings, partitions) -> np.ndarray:
    """4x4 column-stochastic matrix of portrait probabilities per setting pair.

    Column (u1, u2) holds the 2x2 portrait of the joint spin tomogram at
    (u1, u2), flattened row-major; columns run over (a,b), (a,c), (d,b),
    (d,c).
    """
    part1, part2 = partitions
    pairs = [
        (settings.dir_a, settings.dir_b),
        (settings.dir_a, settings.dir_c),
        (settings.dir_d, settings.dir_b),
        (settings.dir_d, settings.dir_c),
    ]
    cols = []
    for u1, u2 in pairs:
        joint = local_spin_tomogram(rho, two_js, u1, u2)
        cols.append(two_qubit_portrait(joint, part1, part2).reshape(-1))
    return validate_stochastic_matrix(np.column_stack(cols))


def chsh_value(m) -> float:
    """CHSH combination |tr(I M)| of a 4x4 stochastic matrix."""
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
    return float(abs(np.trace(CHSH_KERNEL @ m)))


def equality_probability(joint, k: int) -> float:
    """P[first outcome = second outcome + k (mod 3)] from a 3x3 joint tomogram."""
    joint = np.asarray(joint, dtype=float)
    if joint.shape != (3, 3):
        raise ValueError(f"expected a 3x3 joint tomogram, got {joint.shape}")
    k = k % 3
    cols = np.arange(3)
    return float(joint[(cols + k) % 3, cols].sum())


def _offset_mask(k: int) -> np.ndarray:
    mask = np.zeros((3, 3))
    cols = np.arange(3)
    mask[(cols + k) % 3, cols] = 1.0
    return mask


# Per-pair signed masks: I3 = sum over pairs of <mask, joint tomogram>.
# Pairs are (a,b), (c,b), (c,d), (a,d); each mask adds the positive
# equality-probability term and subtracts the negative one.
I3_PAIR_MASKS = (
    _offset_mask(0) - _offset_mask(-1),   # (a,b): +P[A=B]   - P[A=B-1]
    _offset_mask(-1) - _offset_mask(0),   # (c,b): +P[A=B-1] - P[A=B]
    _offset_mask(0) - _offset_mask(-1),   # (c,d): +P[A=B]   - P[A=B-1]
    _offset_mask(0) - _offset_mask(1),    # (a,d): +P[A=B]   - P[A=B+1]
)


def i3_value(rho, settings: BellSettings) -> float:
    """Two-qutrit I3 functional from four local spin tomograms.

    Local-realistic models obey I3 <= 2.  Settings a, c rotate side 1
    and b, d side 2; outcome arithmetic is modulo 3 over the descending-m
    outcome indices.
    """
    rho = as_complex_matrix(rho)
    if rho.shape != (9, 9):
        raise ValueError(f"I3 needs a two-qutrit (9x9) state, got {rho.shape}")
    pairs = [
        (settings.dir_a, settings.dir_b),
        (settings.dir_c, settings.dir_b),
        (settings.dir_c, settings.dir_d),
        (settings.dir_a, settings.dir_d),
    ]
    total = 0.0
    for (u1, u2), mask in zip(pairs, I3_PAIR_MASKS):
        joint = local_spin_tomogram(rho, (2, 2), u1, u2)
        total += float((mask * joint).sum())
    return total
