"""Tuples of N-bit strings and their permutation classes.

Bit strings are plain integers of a declared width ``n``. Qubit / bit
position 1 is the most significant bit, so the integer value of a string
``b_1 b_2 ... b_n`` is ``sum_k b_k 2**(n-k)`` and sorting by value is the
binary order used for class representatives.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MAX_QUBITS = 24

# Upper bound on the number of classes any single enumeration may produce.
DEFAULT_BUDGET = 5_000_000


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed its configured size budget."""


def _check_width(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"bit width must be in 1..{MAX_QUBITS}, got {n}")


def format_bits(value: int, n: int) -> str:
    return format(value, f"0{n}b") if n else ""


@dataclass(frozen=True, order=True)
class BitString:
    value: int
    n: int

    def __post_init__(self):
        _check_width(self.n)
        if not 0 <= self.value < (1 << self.n):
            raise ValueError(f"value {self.value} does not fit in {self.n} bits")

    @classmethod
    def from_str(cls, bits: str) -> BitString:
        return cls(int(bits, 2), len(bits))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.n - 1 - k)) & 1 for k in range(self.n))

    @property
    def weight(self) -> int:
        return bin(self.value).count("1")

    def __str__(self) -> str:
        return format_bits(self.value, self.n)


@dataclass(frozen=True)
class BitTuple:
    """An ordered t-tuple of n-bit strings, stored as integers."""

    entries: tuple[int, ...]
    n: int

    def __post_init__(self):
        # n == 0 is allowed internally (restriction to the empty index set).
        if self.n != 0:
            _check_width(self.n)
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if len(self.entries) < 1:
            raise ValueError("a BitTuple needs at least one entry")
        top = 1 << self.n
        for e in self.entries:
            if not 0 <= e < top:
                raise ValueError(f"entry {e} does not fit in {self.n} bits")

    @classmethod
    def from_strs(cls, *bits: str) -> BitTuple:
        widths = {len(b) for b in bits}
        if len(widths) != 1:
            raise ValueError("all bit strings must share one width")
        return cls(tuple(int(b, 2) for b in bits), widths.pop())

    @property
    def t(self) -> int:
        return len(self.entries)

    def strs(self) -> tuple[str, ...]:
        return tuple(format_bits(e, self.n) for e in self.entries)

    def permuted(self, perm: Sequence[int]) -> BitTuple:
        return BitTuple(tuple(self.entries[i] for i in perm), self.n)

    def __str__(self) -> str:
        return "(" + ",".join(self.strs()) + ")"


@dataclass(frozen=True)
class CanonicalClass:
    representative: BitTuple
    class_size: int

    @property
    def pattern(self) -> tuple[int, ...]:
        """Multiplicities of the distinct strings, largest first."""
        return collision_pattern(self.representative.entries)


@dataclass(frozen=True)
class IndexSubset:
    """A strictly increasing set of 1-based bit positions."""

    indices: tuple[int, ...]
    n: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if not idx:
            raise ValueError("index subset must be nonempty")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"indices must be strictly increasing: {idx}")
        if idx[0] < 1 or idx[-1] > self.n:
            raise IndexError(f"indices {idx} out of range 1..{self.n}")

    @property
    def s(self) -> int:
        return len(self.indices)


def collision_pattern(entries: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted(Counter(entries).values(), reverse=True))


def multinomial(parts: Sequence[int]) -> int:
    """sum(parts)! / prod(p!)"""
    out = math.factorial(sum(parts))
    for p in parts:
        out //= math.factorial(p)
    return out


def class_size(entries: Sequence[int]) -> int:
    return multinomial(Counter(entries).values())


def canonicalize(tup: BitTuple) -> CanonicalClass:
    rep = BitTuple(tuple(sorted(tup.entries)), tup.n)
    return CanonicalClass(rep, class_size(rep.entries))


def _projection_table(n: int, indices: Sequence[int]) -> np.ndarray:
    """Map every n-bit value to its subsequence at ``indices`` (1-based)."""
    values = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for i in indices:
        out = (out << 1) | ((values >> (n - i)) & 1)
    return out


def project_value(value: int, n: int, indices: Sequence[int]) -> int:
    out = 0
    for i in indices:
        out = (out << 1) | ((value >> (n - i)) & 1)
    return out


def restrict(tup: BitTuple, subset: IndexSubset | Sequence[int]) -> BitTuple:
    if isinstance(subset, IndexSubset):
        if subset.n != tup.n:
            raise IndexError(f"subset is over {subset.n} bits, tuple has {tup.n}")
        indices = subset.indices
    else:
        indices = IndexSubset(tuple(subset), tup.n).indices
    return BitTuple(tuple(project_value(e, tup.n, indices) for e in tup.entries), len(indices))


def occurrence_count(tup: BitTuple, target: BitString | int) -> int:
    if isinstance(target, BitString):
        if target.n != tup.n:
            raise ValueError(f"target has {target.n} bits, tuple has {tup.n}")
        target = target.value
    return sum(1 for e in tup.entries if e == target)


def num_classes(n: int, t: int) -> int:
    return math.comb((1 << n) + t - 1, t)


def _check_budget(count: int, budget: int | None) -> None:
    budget = DEFAULT_BUDGET if budget is None else budget
    if count > budget:
        raise BudgetExceeded(f"{count} classes exceed the enumeration budget of {budget}")


def enumerate_classes(n: int, t: int, budget: int | None = None) -> Iterator[CanonicalClass]:
    """Yield every class of t-tuples of n-bit strings, in lexicographic order."""
    _check_width(n)
    if t < 1:
        raise ValueError("t must be >= 1")
    _check_budget(num_classes(n, t), budget)
    for rep in itertools.combinations_with_replacement(range(1 << n), t):
        yield CanonicalClass(BitTuple(rep, n), class_size(rep))


def class_array(n: int, t: int, budget: int | None = None) -> np.ndarray:
    """Class representatives as a (num_classes, t) integer array, same order
    as :func:`enumerate_classes`."""
    if t < 1:
        raise ValueError("t must be >= 1")
    count = num_classes(n, t)
    _check_budget(count, budget)
    flat = itertools.chain.from_iterable(itertools.combinations_with_replacement(range(1 << n), t))
    return np.fromiter(flat, dtype=np.int64, count=count * t).reshape(count, t)


def class_sizes(classes: np.ndarray) -> np.ndarray:
    """Vectorised |class| for the rows of a sorted class array."""
    count, t = classes.shape
    sizes = np.full(count, math.factorial(t), dtype=np.int64)
    # run lengths of equal neighbours in each sorted row
    run = np.ones(count, dtype=np.int64)
    for j in range(1, t):
        same = classes[:, j] == classes[:, j - 1]
        run = np.where(same, run + 1, 1)
        sizes //= np.where(same, run, 1)
    return sizes
