"""Dense brute-force references, independent of the class-basis machinery.

Everything here works in the full d**t tensor space with explicit kron
products and permutation matrices, so it only scales to a handful of qubits.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def sym_projector(d: int, t: int) -> np.ndarray:
    """(1/t!) sum over permutations of the t tensor factors."""
    dim = d**t
    proj = np.zeros((dim, dim))
    digits = list(itertools.product(range(d), repeat=t))
    index = {v: i for i, v in enumerate(digits)}
    for perm in itertools.permutations(range(t)):
        for i, v in enumerate(digits):
            proj[index[tuple(v[p] for p in perm)], i] += 1
    return proj / math.factorial(t)


def tensor_power(psi: np.ndarray, t: int) -> np.ndarray:
    out = np.ones(1)
    for _ in range(t):
        out = np.kron(out, psi)
    return out


def dense_moment(states, t: int) -> np.ndarray:
    vecs = np.array([tensor_power(s, t) for s in states])
    return vecs.T @ vecs.conj() / len(vecs)


def class_isometry(d: int, t: int) -> np.ndarray:
    """Columns are normalised symmetrised basis vectors, one per sorted
    tuple, in lexicographic order."""
    cols = []
    for rep in itertools.combinations_with_replacement(range(d), t):
        v = np.zeros(d**t)
        for perm in set(itertools.permutations(rep)):
            idx = 0
            for x in perm:
                idx = idx * d + x
            v[idx] = 1
        cols.append(v / np.linalg.norm(v))
    return np.array(cols).T


def haar_moment_dense(d: int, t: int) -> np.ndarray:
    return sym_projector(d, t) / math.comb(d + t - 1, t)


def trace_norm(a: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh((a + a.conj().T) / 2)).sum())


def eta_dense(n: int, t: int) -> float:
    """Diagonal-design distance from the explicit diagonal of the phase-
    random moment: entry (x1..xt) has weight |class|/d^t spread over the
    class, i.e. the tensor diagonal d^-t projected onto the symmetric space."""
    d = 1 << n
    diag_part = np.zeros((d**t, d**t))
    # E_phi |psi><psi|^{(x)t} keeps entries (a, b) with b a permutation of a
    for a in itertools.product(range(d), repeat=t):
        ia = 0
        for x in a:
            ia = ia * d + x
        for b in set(itertools.permutations(a)):
            ib = 0
            for x in b:
                ib = ib * d + x
            diag_part[ia, ib] = 1.0 / d**t
    return trace_norm(diag_part - haar_moment_dense(d, t))


def brute_indicator(n: int, t: int, r: int | None, a, b) -> int:
    """Average of prod exp(i(phi(a_k) - phi(b_k))) is 1 or 0; decided by
    comparing multisets of restricted strings directly on bit lists."""
    def bits(v):
        return [(v >> (n - 1 - k)) & 1 for k in range(n)]

    if r is None:
        return int(sorted(a) == sorted(b))
    for sub in itertools.combinations(range(n), r):
        ra = sorted(tuple(bits(v)[i] for i in sub) for v in a)
        rb = sorted(tuple(bits(v)[i] for i in sub) for v in b)
        if ra != rb:
            return 0
    return 1


def eta_fraction_dense(n: int, t: int) -> Fraction:
    """Exact rational distance from eigenvalues known in closed form: the
    two moments commute (both diagonal in the class basis), so the trace
    norm is the sum of per-class differences computed from raw tuples."""
    d = 1 << n
    counts = {}
    for tup in itertools.product(range(d), repeat=t):
        key = tuple(sorted(tup))
        counts[key] = counts.get(key, 0) + 1
    haar = Fraction(1, math.comb(d + t - 1, t))
    return sum((abs(Fraction(c, d**t) - haar) for c in counts.values()), Fraction(0))
