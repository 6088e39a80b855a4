"""Exact moment operators and the exact-design decision procedure.

Diagonal moment operators are never built as matrices. The twirl of a
diagonal ensemble is diagonal in the computational basis of the 2t-copy
space, so it is fully described by a 0/1 rule on pairs of t-tuples
(:class:`PairIndicator`). An r-qubit phase-random circuit reproduces the
twirl of fully random diagonal phases exactly when its rule coincides with
the class-equality rule; both are class functions, so the exhaustive check
groups canonical classes by their restriction signature and looks for two
different classes with the same signature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .bitseq import (
    DEFAULT_BUDGET,
    BitTuple,
    CanonicalClass,
    _check_budget,
    _projection_table,
    canonicalize,
    class_array,
    enumerate_classes,
    num_classes,
    occurrence_count,
    restrict,
)


@dataclass(frozen=True)
class StateMomentDiagonal:
    """A t-copy moment operator that is diagonal in the symmetric class basis."""

    n: int
    t: int
    coefficients: dict[CanonicalClass, Fraction] = field(repr=False)

    def trace(self) -> Fraction:
        return sum(self.coefficients.values(), Fraction(0))

    def weight(self, cls: CanonicalClass | BitTuple) -> Fraction:
        if isinstance(cls, BitTuple):
            cls = canonicalize(cls)
        return self.coefficients[cls]


def haar_state_moment(n: int, t: int, budget: int | None = None) -> StateMomentDiagonal:
    w = Fraction(1, num_classes(n, t))
    return StateMomentDiagonal(n, t, {c: w for c in enumerate_classes(n, t, budget)})


def phase_random_state_moment(n: int, t: int, budget: int | None = None) -> StateMomentDiagonal:
    """Moment of diagonal-design outputs from |+>^n: class weight |class| / 2^(n t)."""
    total = 1 << (n * t)
    return StateMomentDiagonal(
        n, t, {c: Fraction(c.class_size, total) for c in enumerate_classes(n, t, budget)}
    )


def _check_pair(n_tuple: BitTuple, m_tuple: BitTuple) -> None:
    if n_tuple.n != m_tuple.n or n_tuple.t != m_tuple.t:
        raise ValueError(
            f"shape mismatch: ({n_tuple.n} bits, t={n_tuple.t}) vs ({m_tuple.n} bits, t={m_tuple.t})"
        )


@dataclass(frozen=True)
class PairIndicator:
    """0/1 coefficient rule of a diagonal twirl on pairs of t-tuples.

    ``r is None`` is the rule of fully random diagonal phases: 1 iff the two
    tuples are permutations of each other. Otherwise it is the rule of the
    r-qubit phase-random circuit: 1 iff the restrictions to every size-r
    subset of positions are permutations of each other.
    """

    n: int
    t: int
    r: int | None = None

    def __post_init__(self):
        if self.r is not None and not 1 <= self.r <= self.n:
            raise ValueError(f"r must be in 1..{self.n}, got {self.r}")

    def __call__(self, n_tuple: BitTuple, m_tuple: BitTuple) -> int:
        _check_pair(n_tuple, m_tuple)
        if n_tuple.n != self.n or n_tuple.t != self.t:
            raise ValueError("tuple shape does not match the indicator")
        if self.r is None or self.r == self.n:
            return int(canonicalize(n_tuple) == canonicalize(m_tuple))
        for sub in itertools.combinations(range(1, self.n + 1), self.r):
            if sorted(restrict(n_tuple, sub).entries) != sorted(restrict(m_tuple, sub).entries):
                return 0
        return 1


def diag_moment_indicator(n: int, t: int) -> PairIndicator:
    return PairIndicator(n, t, None)


def circuit_moment_indicator(n: int, t: int, r: int) -> PairIndicator:
    return PairIndicator(n, t, r)


def design_threshold(n: int, t: int) -> int:
    """Smallest gate size r giving an exact diagonal t-design on n qubits."""
    return min(t.bit_length(), n)


@dataclass(frozen=True)
class DesignVerdict:
    is_exact_design: bool
    witness: tuple[BitTuple, BitTuple] | None = None

    def __post_init__(self):
        if self.witness is not None and self.is_exact_design:
            raise ValueError("an exact design cannot carry a witness")


def parity_witness(n: int, t: int, r: int) -> tuple[BitTuple, BitTuple]:
    """Two tuples that no r-qubit phase-random circuit can tell apart.

    On positions 1..r+1 one tuple lists every even-weight (r+1)-bit string
    and the other every odd-weight one; all other positions are 0, and both
    are padded with the all-zero string up to length t. Needs r < n and
    t >= 2**r.
    """
    if not 1 <= r < n:
        raise ValueError(f"need 1 <= r < n, got r={r}, n={n}")
    if t < (1 << r):
        raise ValueError(f"need t >= 2**r = {1 << r}, got t={t}")
    shift = n - (r + 1)
    even, odd = [], []
    for v in range(1 << (r + 1)):
        (odd if bin(v).count("1") % 2 else even).append(v << shift)
    pad = [0] * (t - len(even))
    return BitTuple(tuple(even + pad), n), BitTuple(tuple(odd + pad), n)


def _restriction_signature(classes: np.ndarray, n: int, r: int) -> np.ndarray:
    """Row i holds the sorted restrictions of class i to every size-r subset."""
    cols = []
    for sub in itertools.combinations(range(1, n + 1), r):
        proj = _projection_table(n, sub)[classes]
        proj.sort(axis=1)
        cols.append(proj)
    if not cols:
        return np.zeros((len(classes), 0), dtype=np.int64)
    return np.concatenate(cols, axis=1)


@lru_cache(maxsize=None)
def _collision_at(n: int, k: int, r: int, budget: int) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Two distinct k-classes whose size-r restrictions all agree, or None."""
    classes = class_array(n, k, budget)
    sig = _restriction_signature(classes, n, r)
    _, inverse, counts = np.unique(sig, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    dup = np.flatnonzero(counts > 1)
    if dup.size == 0:
        return None
    group = dup[0]
    members = np.flatnonzero(inverse == group)
    a, b = members[0], members[1]
    return tuple(int(x) for x in classes[a]), tuple(int(x) for x in classes[b])


def _exhaustive_verdict(n: int, t: int, r: int, budget: int) -> DesignVerdict:
    if r == n:
        # restriction to all positions is the identity
        return DesignVerdict(True)
    spent = 0
    for k in range(2, t + 1):
        spent += num_classes(n, k)
        _check_budget(spent, budget)
        hit = _collision_at(n, k, r, budget)
        if hit is not None:
            # padding both sides with a common string keeps every restriction
            # equal, so a collision at k < t lifts to one at t
            a, b = hit
            pad = (0,) * (t - k)
            return DesignVerdict(False, (BitTuple(a + pad, n), BitTuple(b + pad, n)))
    return DesignVerdict(True)


def is_exact_design(
    n: int, t: int, r: int, method: str = "exhaustive", budget: int | None = None
) -> DesignVerdict:
    """Decide whether the r-qubit phase-random circuit is an exact diagonal t-design.

    ``method="exhaustive"`` searches canonical classes for a pair that the
    circuit cannot separate; ``method="threshold"`` uses the closed-form
    condition and the parity witness.
    """
    if not 1 <= r <= n:
        raise ValueError(f"r must be in 1..{n}, got {r}")
    if t < 1:
        raise ValueError("t must be >= 1")
    if method == "threshold":
        if r >= design_threshold(n, t):
            return DesignVerdict(True)
        return DesignVerdict(False, parity_witness(n, t, r))
    if method == "exhaustive":
        return _exhaustive_verdict(n, t, r, DEFAULT_BUDGET if budget is None else budget)
    raise ValueError(f"unknown method {method!r}")


def minimal_exact_r(n: int, t: int, method: str = "exhaustive", budget: int | None = None) -> int:
    for r in range(1, n + 1):
        if is_exact_design(n, t, r, method, budget).is_exact_design:
            return r
    raise AssertionError("r = n is always exact")


@dataclass(frozen=True)
class OccurrenceGap:
    gap: int
    uniform: bool


def occurrence_gap(n_tuple: BitTuple, m_tuple: BitTuple) -> OccurrenceGap:
    """Per-string occurrence differences between two tuples of s-bit strings.

    ``uniform`` is true when |G_n(v) - G_m(v)| takes one value over all 2**s
    strings v; ``gap`` is that value (the largest difference otherwise).
    """
    _check_pair(n_tuple, m_tuple)
    s = n_tuple.n
    diffs = {
        abs(occurrence_count(n_tuple, v) - occurrence_count(m_tuple, v)) for v in range(1 << s)
    }
    return OccurrenceGap(max(diffs), len(diffs) == 1)


def gap_pairs(s: int, t: int, budget: int | None = None) -> Iterator[tuple[BitTuple, BitTuple]]:
    """All class pairs of t-tuples of s-bit strings that differ as multisets
    but agree on every (s-1)-position restriction."""
    classes = class_array(s, t, budget)
    sig = _restriction_signature(classes, s, s - 1)
    _, inverse = np.unique(sig, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(inverse, kind="stable")
    bounds = np.flatnonzero(np.diff(inverse[order])) + 1
    for group in np.split(order, bounds):
        for a, b in itertools.combinations(group, 2):
            yield (
                BitTuple(tuple(int(x) for x in classes[a]), s),
                BitTuple(tuple(int(x) for x in classes[b]), s),
            )


def gap_bound_holds(n_tuple: BitTuple, m_tuple: BitTuple) -> bool:
    gap = occurrence_gap(n_tuple, m_tuple)
    return gap.uniform and gap.gap >= 1 and n_tuple.t >= (1 << (n_tuple.n - 1)) * gap.gap

