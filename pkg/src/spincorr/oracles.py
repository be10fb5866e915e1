"""Brute-force physics oracles, independent of the kernel implementations.

Two routes:

* ``fock_oracle_fermion`` builds Jordan-Wigner field operators on the full
  2^M occupation basis of an M-mode fermion system with a diagonal chaotic
  (thermal-like) density matrix, and evaluates normally ordered k-point
  expectation values by direct matrix algebra.

* ``mc_oracle_boson`` samples the classical complex Gaussian field of a
  partially polarized chaotic beam and averages products of intensities.
  It is deterministic for a fixed configuration: counter-based Philox
  substreams per worker, fixed block size, fixed reduction order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .core import CoherenceMatrix, PolarizationState
from .linalg import real_part

MAX_FOCK_MODES = 8
MAX_FOCK_ORDER = 3
MAX_MC_ORDER = 6
CHOLESKY_JITTER = 1e-12
_MC_BLOCK = 1 << 16


@dataclass(frozen=True)
class ModeBasis:
    """Discrete mode expansion of a single spin component.

    ``mode_functions[j, i]`` is the amplitude of mode j at detection point i;
    ``occupations[j]`` is the mean occupation of mode j.  The first-order
    correlation matrix is C[i, l] = sum_j occ_j phi[j, i] conj(phi[j, l]).
    """

    mode_functions: np.ndarray
    occupations: np.ndarray

    def __post_init__(self):
        phi = np.array(self.mode_functions, dtype=complex)
        occ = np.array(self.occupations, dtype=float)
        if phi.ndim != 2:
            raise ValueError(f"mode_functions must be 2-D, got shape {phi.shape}")
        if occ.ndim != 1 or occ.shape[0] != phi.shape[0]:
            raise ValueError("occupations must be 1-D with one entry per mode")
        if phi.shape[0] > MAX_FOCK_MODES:
            raise ValueError(f"{phi.shape[0]} modes exceeds cap {MAX_FOCK_MODES}")
        if phi.size and not np.all(np.isfinite(phi)):
            raise ValueError("mode functions must be finite")
        if occ.size and (not np.all(np.isfinite(occ)) or occ.min() < 0.0):
            raise ValueError("occupations must be finite and >= 0")
        phi.flags.writeable = False
        occ.flags.writeable = False
        object.__setattr__(self, "mode_functions", phi)
        object.__setattr__(self, "occupations", occ)

    @property
    def n_modes(self) -> int:
        return self.mode_functions.shape[0]

    @property
    def n_points(self) -> int:
        return self.mode_functions.shape[1]

    def first_order_correlation(self) -> np.ndarray:
        """C[i, l] = sum_j occ_j phi[j, i] conj(phi[j, l])."""
        phi = self.mode_functions
        return (phi.T * self.occupations) @ phi.conj()

    def coherence(self) -> tuple:
        """Normalize C into (CoherenceMatrix, intensities).

        gamma[i, l] = C[i, l] / sqrt(C[i, i] C[l, l]); requires every point
        to have strictly positive intensity.
        """
        c = self.first_order_correlation()
        intens = np.diagonal(c).real.copy()
        if intens.size and intens.min() <= 0.0:
            raise ValueError("every detection point must have positive intensity")
        d = np.sqrt(intens)
        return CoherenceMatrix(c / np.outer(d, d)), intens


def fermion_mode_operators(n_modes: int) -> list:
    """Jordan-Wigner annihilation operators on the 2^M occupation basis.

    Mode 0 occupies the most significant bit.  The returned matrices satisfy
    the canonical anticommutation relations exactly.
    """
    n_modes = int(n_modes)
    if not 1 <= n_modes <= MAX_FOCK_MODES:
        raise ValueError(f"n_modes must be in [1, {MAX_FOCK_MODES}], got {n_modes}")
    lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    ops = []
    for j in range(n_modes):
        factors = [z] * j + [lower] + [eye] * (n_modes - 1 - j)
        ops.append(reduce(np.kron, factors))
    return ops


def chaotic_weights(occupations) -> np.ndarray:
    """Diagonal of the chaotic density matrix in the occupation basis.

    Each fermion mode with mean occupation p is independently occupied with
    probability p, so the weight of a basis state is the product of p or
    (1 - p) per mode.  Mode order matches ``fermion_mode_operators``.
    """
    occ = np.asarray(occupations, dtype=float)
    if occ.ndim != 1:
        raise ValueError("occupations must be 1-D")
    if occ.size and (occ.min() < 0.0 or occ.max() > 1.0):
        raise ValueError("fermion occupations must be in [0, 1]")
    w = np.array([1.0])
    for p in occ:
        w = np.kron(w, np.array([1.0 - p, p]))
    return w


def fock_oracle_fermion(basis: ModeBasis, points: Sequence[int], k: Optional[int] = None) -> float:
    """Exact k-point fermion correlation by brute-force operator algebra.

    Evaluates <psi+(p1) ... psi+(pk) psi(pk) ... psi(p1)> over the diagonal
    chaotic state, where psi(p) = sum_j phi[j, p] a_j.  Cost grows as
    4^M so both the mode count and k are capped.
    """
    pts = [int(p) for p in points]
    if k is None:
        k = len(pts)
    if k != len(pts):
        raise ValueError(f"k={k} does not match {len(pts)} points")
    if k > MAX_FOCK_ORDER:
        raise ValueError(f"k={k} exceeds Fock oracle cap {MAX_FOCK_ORDER}")
    if k == 0:
        return 1.0
    for p in pts:
        if not 0 <= p < basis.n_points:
            raise ValueError(f"point index {p} out of range")
    if basis.occupations.size and basis.occupations.max() > 1.0:
        raise ValueError("fermion occupations must be in [0, 1]")
    ops = fermion_mode_operators(basis.n_modes)
    phi = basis.mode_functions
    fields = [sum(phi[j, p] * ops[j] for j in range(basis.n_modes)) for p in pts]
    left = fields[0].conj().T
    for f in fields[1:]:
        left = left @ f.conj().T
    right = fields[-1]
    for f in reversed(fields[:-1]):
        right = right @ f
    weights = chaotic_weights(basis.occupations)
    value = complex(weights @ np.diagonal(left @ right))
    return real_part(value)


@dataclass(frozen=True)
class MCConfig:
    """Monte Carlo run description.  Identical configs give bit-identical
    estimates regardless of how the worker partials are scheduled."""

    samples: int
    seed: int
    workers: int = 1

    def __post_init__(self):
        samples = int(self.samples)
        if samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples!r}")
        seed = int(self.seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        workers = int(self.workers)
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers!r}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "workers", workers)


class MCEstimate(NamedTuple):
    estimate: float
    std_error: float


def cholesky_psd(matrix: np.ndarray, jitter: float = CHOLESKY_JITTER) -> np.ndarray:
    """Cholesky factor of a positive semidefinite matrix.

    Singular coherence matrices (for example all-ones) sit exactly on the
    PSD boundary, so on failure one retry is made with ``jitter`` added to
    the diagonal; the distortion is far below sampling noise.
    """
    a = np.asarray(matrix, dtype=complex)
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        pass
    try:
        return np.linalg.cholesky(a + jitter * np.eye(a.shape[0]))
    except np.linalg.LinAlgError:
        raise ValueError(
            f"matrix is not positive semidefinite within jitter {jitter!r}"
        ) from None


def _component_transforms(pol, gamma, intensities, k):
    sub = gamma.restrict(range(k))
    chol = cholesky_psd(sub)
    scale = np.sqrt(np.asarray(intensities, dtype=float)[:k])
    a = scale[:, None] * chol
    return math.sqrt(pol.rho1) * a, math.sqrt(pol.rho2) * a


def _draw_block(rng: np.random.Generator, transform: np.ndarray, n: int) -> np.ndarray:
    """n rows of a circular complex Gaussian with covariance A A^H."""
    k = transform.shape[0]
    x = rng.standard_normal((n, k))
    y = rng.standard_normal((n, k))
    return ((x + 1j * y) / math.sqrt(2.0)) @ transform.T


def draw_field_components(pol, gamma, intensities, k, n, rng):
    """Sample n realizations of the two spin-component field amplitudes at
    the first k points; exposed for distribution-level tests."""
    up_t, down_t = _component_transforms(pol, gamma, intensities, k)
    up = _draw_block(rng, up_t, n)
    down = _draw_block(rng, down_t, n)
    return up, down


def _worker_sums(up_t, down_t, n, rng):
    s = 0.0
    s2 = 0.0
    remaining = n
    while remaining:
        block = min(_MC_BLOCK, remaining)
        up = _draw_block(rng, up_t, block)
        down = _draw_block(rng, down_t, block)
        intensity = up.real**2 + up.imag**2 + down.real**2 + down.imag**2
        prod = intensity.prod(axis=1)
        s += float(prod.sum())
        s2 += float((prod * prod).sum())
        remaining -= block
    return s, s2


def _worker_counts(samples: int, workers: int) -> list:
    base, extra = divmod(samples, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def mc_oracle_boson(
    pol: PolarizationState,
    gamma: CoherenceMatrix,
    intensities: Optional[Sequence[float]],
    k: int,
    config: MCConfig,
) -> MCEstimate:
    """Monte Carlo estimate of the k-point boson correlation.

    The total intensity at each point is |up|^2 + |down|^2 of two independent
    complex Gaussian component fields with covariances rho1/rho2 times the
    (intensity-scaled) coherence matrix.  Returns the sample mean of the
    intensity product and its standard error.

    Worker w draws from Philox(seed) jumped w times, and partial sums are
    combined in worker order, so results are bit-identical for identical
    configs whether or not the workers actually run concurrently.
    """
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > MAX_MC_ORDER:
        raise ValueError(f"k={k} exceeds Monte Carlo cap {MAX_MC_ORDER}")
    if k > gamma.order:
        raise ValueError(f"k={k} exceeds coherence matrix order {gamma.order}")
    if intensities is None:
        intensities = np.ones(k)
    intens = np.asarray(intensities, dtype=float)
    if intens.ndim != 1 or intens.shape[0] < k:
        raise ValueError(f"need at least {k} intensities")
    if not np.all(np.isfinite(intens[:k])) or intens[:k].min() < 0.0:
        raise ValueError("intensities must be finite and >= 0")
    up_t, down_t = _component_transforms(pol, gamma, intens, k)
    counts = _worker_counts(config.samples, config.workers)

    def run(worker: int):
        rng = np.random.Generator(np.random.Philox(key=config.seed).jumped(worker))
        return _worker_sums(up_t, down_t, counts[worker], rng)

    active = [w for w in range(config.workers) if counts[w]]
    if config.workers == 1:
        partials = {0: run(0)}
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            partials = dict(zip(active, pool.map(run, active)))
    s = 0.0
    s2 = 0.0
    for w in active:  # fixed reduction order
        ps, ps2 = partials[w]
        s += ps
        s2 += ps2
    n = config.samples
    mean = s / n
    if n < 2:
        return MCEstimate(mean, math.inf)
    var = max(s2 - n * mean * mean, 0.0) / (n - 1)
    return MCEstimate(mean, math.sqrt(var / n))
