"""Qubit-portraits: coarse-graining qudit tomograms to two outcomes.

A portrait sums tomogram probabilities over the two blocks of an
outcome-set bipartition, turning any d-outcome distribution into a
dichotomic one.  Partitions are canonical (outcome 0 always sits in
block 0) so that enumeration order, and therefore optimizer output, is
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np


@dataclass(frozen=True)
class Partition:
    """Bipartition of the outcome set {0..d-1} into two nonempty blocks."""

    d: int
    block0: tuple[int, ...]
    block1: tuple[int, ...]

    def __post_init__(self):
        b0 = tuple(sorted(self.block0))
        b1 = tuple(sorted(self.block1))
        object.__setattr__(self, "block0", b0)
        object.__setattr__(self, "block1", b1)
        if not b0 or not b1:
            raise ValueError("both blocks must be nonempty")
        if set(b0) & set(b1):
            raise ValueError("blocks must be disjoint")
        if set(b0) | set(b1) != set(range(self.d)):
            raise ValueError(f"blocks must cover all outcomes 0..{self.d - 1}")
        if 0 not in b0:
            raise ValueError("canonical form requires outcome 0 in block 0")

    def sign_vector(self) -> np.ndarray:
        """Outcome values: +1 on block 0, -1 on block 1."""
        eps = np.empty(self.d)
        eps[list(self.block0)] = 1.0
        eps[list(self.block1)] = -1.0
        return eps

    def swapped(self) -> "SwappedPartition":
        """Label-swapped view (block roles exchanged, no longer canonical)."""
        return SwappedPartition(self.d, self.block1, self.block0)

    def encode(self) -> str:
        """Text form for CSV output, e.g. '01|2'."""
        return "".join(map(str, self.block0)) + "|" + "".join(map(str, self.block1))


@dataclass(frozen=True)
class SwappedPartition:
    """Non-canonical bipartition used to test label-flip invariance."""

    d: int
    block0: tuple[int, ...]
    block1: tuple[int, ...]

    def sign_vector(self) -> np.ndarray:
        eps = np.empty(self.d)
        eps[list(self.block0)] = 1.0
        eps[list(self.block1)] = -1.0
        return eps

    def encode(self) -> str:
        return "".join(map(str, self.block0)) + "|" + "".join(map(str, self.block1))


def enumerate_bipartitions(d: int) -> list[Partition]:
    """All 2^(d-1) - 1 canonical bipartitions, lexicographic on block 0."""
    if d < 2:
        raise ValueError("bipartitions need at least two outcomes")
    parts = []
    rest = list(range(1, d))
    for size in range(0, d - 1):
        for extra in combinations(rest, size):
            block0 = (0,) + extra
            block1 = tuple(sorted(set(range(d)) - set(block0)))
            parts.append(Partition(d, block0, block1))
    parts.sort(key=lambda p: p.block0)
    return parts


def qubit_portrait(probs, part) -> np.ndarray:
    """Two-outcome distribution: sum of probabilities over each block."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (part.d,):
        raise ValueError(f"tomogram length {probs.shape} does not match d={part.d}")
    return np.array([probs[list(part.block0)].sum(), probs[list(part.block1)].sum()])


def two_qubit_portrait(joint, part1, part2) -> np.ndarray:
    """2x2 portrait of a joint tomogram under one partition per subsystem."""
    joint = np.asarray(joint, dtype=float)
    if joint.shape != (part1.d, part2.d):
        raise ValueError(
            f"joint shape {joint.shape} does not match partitions {part1.d} x {part2.d}"
        )
    blocks1 = (list(part1.block0), list(part1.block1))
    blocks2 = (list(part2.block0), list(part2.block1))
    out = np.empty((2, 2))
    for b1 in range(2):
        for b2 in range(2):
            out[b1, b2] = joint[np.ix_(blocks1[b1], blocks2[b2])].sum()
    return out
