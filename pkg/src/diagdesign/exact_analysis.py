"""Closed-form exact quantities.

Everything here is exact rational arithmetic. The distance between the Haar
moment and the phase-random moment is a sum over canonical classes of a
term that only depends on the class's collision pattern, so it is summed
over integer partitions of t instead of over classes; the cost then no
longer depends on the dimension d = 2**n.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .bitseq import multinomial
from .moments import haar_state_moment, phase_random_state_moment

MAX_PARTITION_T = 40


@dataclass(frozen=True)
class CollisionPattern:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(sorted((int(p) for p in self.parts), reverse=True))
        object.__setattr__(self, "parts", parts)
        if not parts or parts[-1] < 1:
            raise ValueError(f"parts must be positive integers, got {self.parts}")

    @property
    def t(self) -> int:
        return sum(self.parts)

    @property
    def part_count(self) -> int:
        return len(self.parts)

    @property
    def class_size(self) -> int:
        """Number of ordered tuples in any class with this pattern."""
        return multinomial(self.parts)


def partitions(t: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Integer partitions of t as nonincreasing tuples."""
    if largest is None:
        largest = t
    if t == 0:
        yield ()
        return
    for first in range(min(t, largest), 0, -1):
        for rest in partitions(t - first, first):
            yield (first,) + rest


def collision_patterns(t: int) -> Iterator[CollisionPattern]:
    if not 1 <= t <= MAX_PARTITION_T:
        raise ValueError(f"t must be in 1..{MAX_PARTITION_T}, got {t}")
    for p in partitions(t):
        yield CollisionPattern(p)


def pattern_class_count(n: int, t: int, pattern: CollisionPattern) -> int:
    """Number of canonical classes of t-tuples of n-bit strings with this pattern."""
    if pattern.t != t:
        raise ValueError(f"pattern {pattern.parts} is not a partition of {t}")
    d = 1 << n
    ell = pattern.part_count
    count = math.comb(d, ell) * math.factorial(ell)
    for mult in Counter(pattern.parts).values():
        count //= math.factorial(mult)
    return count


@dataclass(frozen=True)
class ExactDistance:
    value: Fraction
    n: int
    t: int

    def __post_init__(self):
        if not 0 <= self.value <= 2:
            raise ValueError(f"trace distance {self.value} outside [0, 2]")

    def __float__(self) -> float:
        return float(self.value)


def _haar_weight(n: int, t: int) -> Fraction:
    return Fraction(1, math.comb((1 << n) + t - 1, t))


def eta_exact(n: int, t: int) -> ExactDistance:
    """Trace distance between the Haar t-copy moment and the moment of a
    diagonal-unitary t-design applied to |+>^n."""
    haar = _haar_weight(n, t)
    dt = 1 << (n * t)
    total = Fraction(0)
    for pat in collision_patterns(t):
        total += pattern_class_count(n, t, pat) * abs(haar - Fraction(pat.class_size, dt))
    return ExactDistance(total, n, t)


def eta_by_enumeration(n: int, t: int, budget: int | None = None) -> ExactDistance:
    """Same distance, summed class by class over the full class list."""
    haar = haar_state_moment(n, t, budget)
    phase = phase_random_state_moment(n, t, budget)
    total = sum((abs(w - phase.coefficients[c]) for c, w in haar.coefficients.items()), Fraction(0))
    return ExactDistance(total, n, t)


def eta_asymptotic(n: int, t: int) -> Fraction:
    return Fraction(t * (t - 1), 1 << n)


@dataclass(frozen=True)
class _Term:
    """``multiplicity * |offset + slope * p|``"""

    offset: Fraction
    slope: Fraction
    multiplicity: int

    def at(self, p: Fraction) -> Fraction:
        return self.multiplicity * abs(self.offset + self.slope * p)

    @property
    def root(self) -> Fraction | None:
        return None if self.slope == 0 else -self.offset / self.slope


@dataclass(frozen=True)
class MixingCurve:
    """Distance to the Haar moment of the ensemble that applies the diagonal
    design with probability p and otherwise emits a uniformly random
    computational basis state, as an exact piecewise-linear function of p."""

    n: int
    t: int
    terms: tuple[_Term, ...]
    breakpoints: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]
    p_star: Fraction
    d_at_p_star: Fraction

    def __call__(self, p) -> Fraction:
        p = Fraction(p)
        return sum((term.at(p) for term in self.terms), Fraction(0))

    @property
    def improvement(self) -> Fraction:
        return self(1) - self.d_at_p_star


def mixing_optimum_closed_form(n: int, t: int) -> Fraction:
    d = 1 << n
    c = math.comb(t + d - 1, t)
    return (1 - Fraction(d, c)) / (1 - Fraction(1, d ** (t - 1)))


def mixing_curve(n: int, t: int) -> MixingCurve:
    if t < 2:
        raise ValueError("the mixing protocol needs t >= 2")
    d = 1 << n
    haar = _haar_weight(n, t)
    dt = Fraction(1, d**t)
    terms = []
    for pat in collision_patterns(t):
        count = pattern_class_count(n, t, pat)
        if pat.part_count == 1:
            # |x...x>: weight (1-p)/d + p/d^t
            terms.append(_Term(haar - Fraction(1, d), Fraction(1, d) - dt, count))
        else:
            terms.append(_Term(haar, -pat.class_size * dt, count))
    terms = tuple(t_ for t_ in terms if t_.multiplicity)

    inner = sorted({r for r in (term.root for term in terms) if r is not None and 0 < r < 1})
    knots = [Fraction(0)] + inner + [Fraction(1)]
    slopes = []
    for lo, hi in zip(knots, knots[1:]):
        mid = (lo + hi) / 2
        slope = sum(
            (term.multiplicity * term.slope * (1 if term.offset + term.slope * mid > 0 else -1) for term in terms),
            Fraction(0),
        )
        slopes.append(slope)

    def value(p: Fraction) -> Fraction:
        return sum((term.at(p) for term in terms), Fraction(0))

    # convex: minimum at the first knot where the slope turns nonnegative
    p_star = knots[-1]
    for knot, slope in zip(knots, slopes):
        if slope >= 0:
            p_star = knot
            break
    return MixingCurve(n, t, terms, tuple(knots), tuple(slopes), p_star, value(p_star))


def required_length(epsilon: float, n: int, t: int, alpha: float) -> float:
    """Local-circuit length needed after the diagonal design to reach epsilon,
    assuming the distance halves every ``alpha`` layers from t(t-1)/2**n.

    Zero when epsilon is already at or above the exact diagonal-design
    distance.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if t < 2 or epsilon >= float(eta_exact(n, t).value):
        return 0.0
    length = alpha * (math.log2(1 / epsilon) - n + math.log2(t * (t - 1)))
    return max(0.0, length)
