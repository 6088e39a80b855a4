"""Phase-random circuits, their discrete controlled-phase form, and local
random brickwork layers.

Diagonal unitaries are kept as phase vectors of length 2**n: composing two
of them adds the vectors. Qubit k (1-based) is bit position k of the basis
index, counted from the most significant bit.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .bitseq import _check_budget, _projection_table, class_array
from .moments import design_threshold

TWO_PI = 2.0 * np.pi


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class DiagonalUnitary:
    n: int
    phases: np.ndarray

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        if phases.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} phases, got shape {phases.shape}")
        if not np.all(np.isfinite(phases)):
            raise ValueError("phases must be finite")
        phases = np.mod(phases, TWO_PI)
        object.__setattr__(self, "phases", phases)

    def compose(self, other: DiagonalUnitary) -> DiagonalUnitary:
        return DiagonalUnitary(self.n, self.phases + other.phases)

    def conj(self) -> DiagonalUnitary:
        return DiagonalUnitary(self.n, -self.phases)

    def diagonal(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal())

    def apply(self, state: np.ndarray) -> np.ndarray:
        return self.diagonal() * state


@dataclass(frozen=True)
class PhaseRandomCircuitSpec:
    """An independent random diagonal gate on every size-r subset of n qubits."""

    n: int
    r: int
    gate_supports: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not 1 <= self.r <= self.n:
            raise ValueError(f"r must be in 1..{self.n}, got {self.r}")
        if len(set(self.gate_supports)) != len(self.gate_supports):
            raise ValueError("gate supports must be distinct")
        if len(self.gate_supports) != math.comb(self.n, self.r):
            raise ValueError("a phase-random circuit acts on every size-r subset")

    @classmethod
    def build(cls, n: int, r: int) -> PhaseRandomCircuitSpec:
        return cls(n, r, tuple(itertools.combinations(range(1, n + 1), r)))


@dataclass(frozen=True)
class DiagGate:
    """diag(e^{i phases[j]}) on ``targets``; local index j reads the target
    bits with the first target as most significant bit."""

    targets: tuple[int, ...]
    phases: np.ndarray

    def to_text(self) -> str:
        body = ",".join(float(p).hex() for p in self.phases)
        return f"DIAG r={len(self.targets)} targets={_join(self.targets)} phases={body}"


@dataclass(frozen=True)
class CPGate:
    """Controlled-phase-type gate: phase 2*pi*k/m on the all-ones state of ``targets``."""

    targets: tuple[int, ...]
    k: int
    m: int

    def __post_init__(self):
        if not 0 <= self.k < self.m:
            raise ValueError(f"phase index {self.k} out of range for m={self.m}")

    @property
    def angle(self) -> float:
        return TWO_PI * self.k / self.m

    def to_text(self) -> str:
        return f"CP s={len(self.targets)} targets={_join(self.targets)} phase={self.k}/{self.m}"


def _join(xs: Sequence[int]) -> str:
    return ",".join(str(x) for x in xs)


_CP_RE = re.compile(r"^CP s=(\d+) targets=([\d,]+) phase=(\d+)/(\d+)$")
_DIAG_RE = re.compile(r"^DIAG r=(\d+) targets=([\d,]+) phases=(\S+)$")


def parse_gate(line: str) -> CPGate | DiagGate:
    line = line.strip()
    if m := _CP_RE.match(line):
        s, targets, k, mod = m.groups()
        targets = tuple(int(x) for x in targets.split(","))
        if len(targets) != int(s):
            raise ValueError(f"size field does not match targets: {line!r}")
        return CPGate(targets, int(k), int(mod))
    if m := _DIAG_RE.match(line):
        r, targets, phases = m.groups()
        targets = tuple(int(x) for x in targets.split(","))
        values = np.array([float.fromhex(p) for p in phases.split(",")])
        if len(targets) != int(r) or len(values) != 1 << len(targets):
            raise ValueError(f"malformed DIAG gate: {line!r}")
        return DiagGate(targets, values)
    raise ValueError(f"unrecognised gate line: {line!r}")


def dumps_gates(gates: Sequence[CPGate | DiagGate]) -> str:
    return "".join(g.to_text() + "\n" for g in gates)


def loads_gates(text: str) -> list[CPGate | DiagGate]:
    return [parse_gate(line) for line in text.splitlines() if line.strip() and not line.startswith("#")]


def diagonal_from_gates(n: int, gates: Sequence[CPGate | DiagGate]) -> DiagonalUnitary:
    phases = np.zeros(1 << n)
    for g in gates:
        local = _projection_table(n, g.targets)
        if isinstance(g, CPGate):
            phases += np.where(local == (1 << len(g.targets)) - 1, g.angle, 0.0)
        else:
            phases += g.phases[local]
    return DiagonalUnitary(n, phases)


def sample_phase_random_gates(spec: PhaseRandomCircuitSpec, seed=None) -> list[DiagGate]:
    rng = _rng(seed)
    return [DiagGate(sup, rng.uniform(0.0, TWO_PI, 1 << spec.r)) for sup in spec.gate_supports]


def sample_phase_random(spec: PhaseRandomCircuitSpec, seed=None) -> DiagonalUnitary:
    return diagonal_from_gates(spec.n, sample_phase_random_gates(spec, seed))


def sample_phase_random_batch(spec: PhaseRandomCircuitSpec, size: int, seed=None) -> np.ndarray:
    """(size, 2**n) phase vectors of independent circuit draws (unreduced)."""
    rng = _rng(seed)
    out = np.zeros((size, 1 << spec.n))
    for sup in spec.gate_supports:
        local = _projection_table(spec.n, sup)
        out += rng.uniform(0.0, TWO_PI, (size, 1 << spec.r))[:, local]
    return out


def discrete_phase_count(t: int, s: int) -> int:
    """Size of the phase alphabet for an s-qubit controlled-phase gate."""
    return t // (1 << (s - 1)) + 1


def discrete_phase_set(t: int, s: int) -> list[Fraction]:
    """Allowed phases as fractions of a full turn."""
    m = discrete_phase_count(t, s)
    return [Fraction(k, m) for k in range(m)]


def discrete_gate_layout(n: int, t: int, r: int) -> list[tuple[tuple[int, ...], int]]:
    """(targets, alphabet size) of every controlled-phase gate, one block per
    size-r support; subsets shared between supports are listed once per support."""
    layout = []
    for sup in itertools.combinations(range(1, n + 1), r):
        for s in range(1, r + 1):
            for sub in itertools.combinations(sup, s):
                layout.append((sub, discrete_phase_count(t, s)))
    return layout


def sample_discrete_gates(n: int, t: int, r: int, seed=None) -> list[CPGate]:
    rng = _rng(seed)
    return [CPGate(sub, int(rng.integers(m)), m) for sub, m in discrete_gate_layout(n, t, r)]


def sample_discrete_design(n: int, t: int, r: int, seed=None) -> DiagonalUnitary:
    return diagonal_from_gates(n, sample_discrete_gates(n, t, r, seed))


def root_of_unity_mean(c: int, m: int) -> Fraction:
    """Exact (1/m) * sum_k exp(2 pi i k c / m): a geometric sum over the m-th
    roots of unity, equal to 1 when m divides c and 0 otherwise."""
    return Fraction(1) if c % m == 0 else Fraction(0)


def exact_discrete_moment_check(n: int, t: int, r: int, budget: int = 1_000_000) -> bool:
    """Does the discrete controlled-phase circuit reproduce the twirl of fully
    random diagonal phases on every pair of t-tuple classes?

    For each gate the phase factor of a pair (a, b) is exp(i alpha (G_a - G_b))
    with G the number of entries that are all-ones on the gate's targets, so
    its average over the alphabet is a root-of-unity mean.
    """
    if not 1 <= r <= n:
        raise ValueError(f"r must be in 1..{n}, got {r}")
    classes = class_array(n, t, budget)
    _check_budget(len(classes) ** 2, budget)
    layout = discrete_gate_layout(n, t, r)
    # the mean only depends on (gate targets, m): duplicates give equal factors
    unique = sorted(set(layout))
    avg = np.ones((len(classes), len(classes)), dtype=object)
    avg[:] = Fraction(1)
    for targets, m in unique:
        ones = (_projection_table(n, targets) == (1 << len(targets)) - 1)[classes].sum(axis=1)
        diff = ones[:, None] - ones[None, :]
        factor = np.vectorize(lambda c: root_of_unity_mean(int(c), m), otypes=[object])(diff)
        avg = avg * factor
    target = np.eye(len(classes), dtype=int)
    return bool(np.all(avg == target))


@dataclass(frozen=True)
class GateCount:
    n: int
    t: int
    r: int
    per_size_counts: dict[int, int]
    total_elementary: int
    total_below_r: int


def quadratic_cost(s: int) -> int:
    return s * s


def unit_cost(s: int) -> int:
    return 1


def gate_count(n: int, t: int, cost_model: Callable[[int], int] = quadratic_cost) -> GateCount:
    """Controlled-phase gate census of the exact diagonal t-design circuit.

    ``total_elementary`` prices every gate size 1..r; ``total_below_r``
    stops at r-1.
    """
    r = design_threshold(n, t)
    supports = math.comb(n, r)
    per_size = {s: supports * math.comb(r, s) for s in range(1, r + 1)}
    total = sum(cost_model(s) * c for s, c in per_size.items())
    below = sum(cost_model(s) * c for s, c in per_size.items() if s < r)
    return GateCount(n, t, r, per_size, total, below)


def haar_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-random unitary: QR of a complex Ginibre matrix with R's diagonal
    made real positive."""
    rng = _rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def brickwork_pairs(n: int, parity: int) -> list[tuple[int, int]]:
    """1-based neighbour pairs of an open chain: (1,2),(3,4).. for parity 0,
    (2,3),(4,5).. for parity 1."""
    if parity not in (0, 1):
        raise ValueError("parity must be 0 (even) or 1 (odd)")
    return [(q, q + 1) for q in range(1 + parity, n, 2)]


@dataclass(frozen=True)
class LocalRandomLayer:
    n: int
    parity: int
    gates: tuple[tuple[tuple[int, int], np.ndarray], ...]

    def apply(self, states: np.ndarray) -> np.ndarray:
        """Apply the layer to the last axis-group of ``states``.

        ``states`` has shape (2**n,) or (2**n, k) (columns are states).
        """
        return apply_layer(self.n, self.gates, states)


def apply_layer(n: int, gates, states: np.ndarray) -> np.ndarray:
    dim = 1 << n
    squeeze = states.ndim == 1
    x = states.reshape(dim, -1)
    extra = x.shape[1]
    x = x.reshape([2] * n + [extra])
    for (a, b), mat in gates:
        g = mat.reshape(2, 2, 2, 2)
        x = np.tensordot(g, x, axes=([2, 3], [a - 1, b - 1]))
        x = np.moveaxis(x, [0, 1], [a - 1, b - 1])
    x = x.reshape(dim, extra)
    return x[:, 0] if squeeze else x


def sample_local_random_layer(n: int, parity: int, seed=None) -> LocalRandomLayer:
    if n < 2:
        raise ValueError("a brickwork layer needs at least two qubits")
    rng = _rng(seed)
    gates = tuple((pair, haar_unitary(4, rng)) for pair in brickwork_pairs(n, parity))
    return LocalRandomLayer(n, parity, gates)
