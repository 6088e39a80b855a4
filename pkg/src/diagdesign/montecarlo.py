"""Ensemble simulation on the symmetric subspace.

t-copy moments of pure-state ensembles live on span{|class>}, whose
dimension C(d+t-1, t) is far below d**t. A state |psi> enters only through
its symmetric amplitude vector, the coordinates of |psi>^{(x)t} in that
basis.

Decay experiment
----------------
After the diagonal t-design, T brickwork layers of Haar-random two-qubit
gates are applied and the distance D(T) of the averaged t-copy moment to the
Haar moment is recorded. Two estimators are available:

``phase_average="sampled"``
    Every sample draws a phase-random circuit output and a brickwork
    circuit; the moment is the plain average over samples.
``phase_average="exact"`` (t = 2 only, the default there)
    The average over the diagonal design is done in closed form and only
    the brickwork circuit is sampled. For t = 2 the phase-random moment is
    (2/d^2) P - (1/d^2) sum_x |xx><xx| with P the symmetric projector, and
    U(x)U fixes P, so a circuit U contributes through the d product states
    U|x>(x)U|x> only. D(0) is then exactly the diagonal-design distance.

The sampled estimator is biased upward by roughly sqrt(C/samples) which, at
1000 samples, already exceeds the signal for n >= 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg.blas import zherk

from .bitseq import BitTuple, class_array, class_sizes
from .circuits import PhaseRandomCircuitSpec, _rng, haar_unitary, sample_phase_random_batch
from .exact_analysis import eta_exact
from .moments import StateMomentDiagonal, design_threshold

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
# points within this factor of the Haar-ensemble estimate count as noise floor
FLOOR_FACTOR = 2.0


@dataclass(frozen=True)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes, got shape {amps.shape}")
        if abs(np.linalg.norm(amps) - 1) > NORM_TOL:
            raise ValueError("state vector is not normalised")
        object.__setattr__(self, "amplitudes", amps)


def plus_state(n: int) -> StateVector:
    return StateVector(n, np.full(1 << n, 2 ** (-n / 2), dtype=complex))


@dataclass(frozen=True)
class SymmetricBasis:
    """Class representatives (rows) with sqrt(|class|) weights."""

    n: int
    t: int
    classes: np.ndarray = field(repr=False)
    sqrt_sizes: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, n: int, t: int, budget: int | None = None) -> SymmetricBasis:
        classes = class_array(n, t, budget)
        return cls(n, t, classes, np.sqrt(class_sizes(classes).astype(float)))

    @property
    def dim(self) -> int:
        return len(self.classes)

    def rows(self, amplitudes: np.ndarray) -> np.ndarray:
        """Symmetric amplitudes of every row of a (k, 2**n) amplitude array."""
        out = amplitudes[:, self.classes[:, 0]]
        for j in range(1, self.t):
            out = out * amplitudes[:, self.classes[:, j]]
        return out * self.sqrt_sizes


def symmetric_amplitudes(state: StateVector, t: int, basis: SymmetricBasis | None = None) -> np.ndarray:
    """Coordinates of |psi>^{(x)t} in the orthonormal class basis:
    sqrt(|class|) * prod_k psi[n_k]."""
    basis = basis or SymmetricBasis.build(state.n, t)
    return basis.rows(state.amplitudes[None, :])[0]


@dataclass(frozen=True)
class SymmetricOperator:
    n: int
    t: int
    basis: SymmetricBasis = field(repr=False)
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"matrix shape {m.shape} does not match basis dimension {self.basis.dim}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("operator is not Hermitian")
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @classmethod
    def from_diagonal(cls, moment: StateMomentDiagonal, basis: SymmetricBasis | None = None) -> SymmetricOperator:
        basis = basis or SymmetricBasis.build(moment.n, moment.t)
        weights = np.array(
            [float(moment.weight(BitTuple(tuple(int(x) for x in row), moment.n))) for row in basis.classes]
        )
        return cls(moment.n, moment.t, basis, np.diag(weights).astype(complex))


def haar_moment_operator(n: int, t: int, basis: SymmetricBasis | None = None) -> SymmetricOperator:
    """The Haar t-copy moment: the symmetric projector over its dimension."""
    basis = basis or SymmetricBasis.build(n, t)
    return SymmetricOperator(n, t, basis, np.eye(basis.dim, dtype=complex) / basis.dim)


def trace_distance(a: SymmetricOperator, b: SymmetricOperator) -> float:
    if a.matrix.shape != b.matrix.shape:
        raise ValueError(f"dimension mismatch: {a.matrix.shape} vs {b.matrix.shape}")
    if not np.array_equal(a.basis.classes, b.basis.classes):
        raise ValueError("operators are expressed in different class orderings")
    return float(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix)).sum())


def estimate_moment(
    sampler: Callable[[np.random.Generator], StateVector], t: int, samples: int, seed=None
) -> SymmetricOperator:
    """Average of |psi><psi|^{(x)t} over ``samples`` draws of ``sampler(rng)``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = _rng(seed)
    first = sampler(rng)
    basis = SymmetricBasis.build(first.n, t)
    amps = np.empty((samples, 1 << first.n), dtype=complex)
    amps[0] = first.amplitudes
    for i in range(1, samples):
        amps[i] = sampler(rng).amplitudes
    gram = _gram(basis.rows(amps))
    return SymmetricOperator(first.n, t, basis, gram / samples)


def _gram_upper(rows: np.ndarray) -> np.ndarray:
    """Upper triangle of sum_i rows[i] rows[i]^dagger (lower part is junk)."""
    return zherk(1.0, np.ascontiguousarray(rows.conj()), trans=2)


def _hermitian_from_upper(upper: np.ndarray) -> np.ndarray:
    u = np.triu(upper)
    return u + np.triu(upper, 1).conj().T


def _gram(rows: np.ndarray) -> np.ndarray:
    return _hermitian_from_upper(_gram_upper(rows))


def _trace_with_upper(sign: np.ndarray, upper: np.ndarray) -> float:
    """Re tr(sign @ Q) for Hermitian Q given by its upper triangle."""
    u = np.triu(upper)
    return float(2.0 * np.real(np.sum(sign.T * u)) - np.real(np.sum(np.diag(sign) * np.diag(u))))


# --- brickwork evolution ----------------------------------------------------


def _haar4_batch(rng: np.random.Generator, size: int) -> np.ndarray:
    z = (rng.standard_normal((size, 4, 4)) + 1j * rng.standard_normal((size, 4, 4))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    return q * (diag / np.abs(diag))[:, None, :]


def apply_brickwork_batch(n: int, parity: int, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Apply an independent random brickwork layer to each of the S stacks in
    ``states`` (shape (S, 2**n, k)). Gates on (q, q+1) are drawn in order of q."""
    size = states.shape[0]
    k = states.shape[2]
    for q in range(1 + parity, n, 2):
        gates = _haar4_batch(rng, size)
        x = states.reshape(size, 1 << (q - 1), 4, 1 << (n - q - 1), k)
        x = np.einsum("sij,sajbk->saibk", gates, x)
        states = x.reshape(size, 1 << n, k)
    return states


# --- decay experiment -------------------------------------------------------


@dataclass(frozen=True)
class DecayPoint:
    T: int
    distance: float
    stderr: float
    in_fit: bool = False


@dataclass(frozen=True)
class DecayResult:
    n: int
    t: int
    samples: int
    mode: str
    eta: float
    noise_floor: float
    noise_floor_stderr: float
    points: tuple[DecayPoint, ...]
    alpha: float
    r_squared: float
    fit_points: int


class _Estimator:
    """Turns batches of stacked states into D and a bootstrap standard error."""

    def __init__(self, basis: SymmetricBasis, offset: float, scale: float):
        self.basis = basis
        self.offset = offset
        self.scale = scale

    def distance(self, stacks: list[np.ndarray], n_boot: int, rng: np.random.Generator) -> tuple[float, float]:
        dim = self.basis.dim
        uppers = []
        total = np.zeros((dim, dim), dtype=complex)
        samples = 0
        for x in stacks:
            size, d, k = x.shape
            samples += size
            # columns of every stacked matrix, one amplitude row each
            amps = np.swapaxes(x, 1, 2).reshape(size * k, d)
            upper = _gram_upper(self.basis.rows(amps))
            total += np.triu(upper)
            # single precision is plenty for the bootstrap spread
            uppers.append(upper.astype(np.complex64))
        q = _hermitian_from_upper(total) / samples
        delta = self.scale * q
        delta[np.diag_indices(dim)] += self.offset - 1.0 / dim
        vals, vecs = np.linalg.eigh(delta)
        dist = float(np.abs(vals).sum())
        if n_boot <= 0 or len(stacks) < 2:
            return dist, 0.0
        # linearised bootstrap: dD = scale * Re tr(sign(delta) dQ)
        sign = (vecs * np.sign(vals)) @ vecs.conj().T
        contrib = np.array([_trace_with_upper(sign, u) for u in uppers])
        if np.allclose(contrib, contrib[0], rtol=0, atol=1e-12 * max(1.0, abs(contrib[0]))):
            return dist, 0.0
        picks = rng.integers(len(stacks), size=(n_boot, len(stacks)))
        boot = self.scale * (contrib[picks].sum(axis=1) - contrib.sum()) / samples
        return dist, float(boot.std(ddof=1))


def _fit_decay(points: list[DecayPoint], eta: float, floor: float):
    """Least-squares fit of log2 D(T) = log2 eta - T / alpha.

    Uses the leading run of points with D > 3 stderr and D > 2 * floor, where
    floor is the estimator's value on an exactly Haar ensemble. The fit is
    unweighted: the bootstrap spread vanishes at small T, where D is locally
    insensitive to the sampled gates.
    """
    window = []
    for p in points:
        if not (p.distance > 3 * p.stderr and p.distance > FLOOR_FACTOR * floor):
            break
        window.append(p)
    if len(window) < 3:
        return window, float("nan"), float("nan")
    ts = np.array([p.T for p in window], dtype=float)
    ys = np.log2([p.distance for p in window]) - math.log2(eta)
    slope = float(np.dot(ts, ys) / np.dot(ts, ts))
    resid = ys - slope * ts
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else float("nan")
    alpha = -1.0 / slope if slope < 0 else float("inf")
    return window, alpha, r2


def decay_experiment(
    n: int,
    t: int,
    max_T: int,
    samples: int = 1000,
    seed=None,
    *,
    phase_average: str = "auto",
    batches: int = 20,
    n_boot: int = 200,
) -> DecayResult:
    """Distance to the Haar t-copy moment after the diagonal design followed
    by T = 0..max_T brickwork layers (open chain, parities 0, 1, 0, ...).

    Sample i of point T+1 extends sample i of point T by one layer. The noise
    floor is the same estimator run on Haar-random n-qubit unitaries.
    """
    if n < 2:
        raise ValueError("need n >= 2 for two-qubit layers")
    if phase_average == "auto":
        phase_average = "exact" if t == 2 else "sampled"
    if phase_average == "exact" and t != 2:
        raise ValueError("the closed-form phase average is implemented for t = 2 only")
    if phase_average not in ("exact", "sampled"):
        raise ValueError(f"unknown phase_average {phase_average!r}")
    batches = max(1, min(batches, samples))
    sizes = [samples // batches + (1 if b < samples % batches else 0) for b in range(batches)]

    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = [np.random.default_rng(s) for s in root.spawn(batches + 2)]
    boot_rng, floor_rng = streams[-2], streams[-1]
    streams = streams[:-2]

    d = 1 << n
    basis = SymmetricBasis.build(n, t)
    eta = float(eta_exact(n, t).value)
    if phase_average == "exact":
        est = _Estimator(basis, 2.0 / d**2, -1.0 / d**2)
        stacks = [np.broadcast_to(np.eye(d, dtype=complex), (s, d, d)).copy() for s in sizes]
    else:
        est = _Estimator(basis, 0.0, 1.0)
        spec = PhaseRandomCircuitSpec.build(n, design_threshold(n, t))
        stacks = []
        for s, rng in zip(sizes, streams):
            phases = sample_phase_random_batch(spec, s, rng)
            stacks.append((np.exp(1j * phases) / np.sqrt(d))[:, :, None])

    points = []
    for T in range(max_T + 1):
        if T > 0:
            parity = (T - 1) % 2
            stacks = [apply_brickwork_batch(n, parity, x, rng) for x, rng in zip(stacks, streams)]
        dist, err = est.distance(stacks, n_boot, boot_rng)
        points.append(DecayPoint(T, dist, err))

    if phase_average == "exact":
        ref = [np.stack([haar_unitary(d, floor_rng) for _ in range(s)]) for s in sizes]
    else:
        ref = [np.stack([haar_unitary(d, floor_rng)[:, :1] for _ in range(s)]) for s in sizes]
    floor, floor_err = est.distance(ref, n_boot, boot_rng)

    window, alpha, r2 = _fit_decay(points, eta, floor)
    in_fit = {p.T for p in window}
    points = tuple(DecayPoint(p.T, p.distance, p.stderr, p.T in in_fit) for p in points)
    return DecayResult(n, t, samples, phase_average, eta, floor, floor_err, points, alpha, r2, len(window))
