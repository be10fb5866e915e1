"""Domain types shared across the package.

A partially polarized chaotic beam is described by the degree of polarization
P, which splits the intensity between the two spin components with weights
rho1 = (1 + P) / 2 and rho2 = (1 - P) / 2, together with a model for the
complex degree of coherence between pairs of detection events.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

HERMITICITY_TOL = 1e-12
# Eigenvalues this far below zero are treated as rounding noise, anything
# lower means the matrix is not a valid coherence matrix.
PSD_EIGENVALUE_FLOOR = -1e-10


class Statistics(str, enum.Enum):
    """Exchange statistics of the detected particles."""

    FERMION = "fermion"
    BOSON = "boson"
    CUSTOM = "custom"


def rho_from_P(p) -> tuple[float, float]:
    """Spin-component weights (rho1, rho2) for degree of polarization ``p``.

    rho1 = (1 + p) / 2 and rho2 = (1 - p) / 2, so rho1 + rho2 = 1 exactly.
    Requires 0 <= p <= 1.
    """
    p = float(p)
    if not math.isfinite(p) or not 0.0 <= p <= 1.0:
        raise ValueError(f"degree of polarization must be in [0, 1], got {p!r}")
    return (1.0 + p) / 2.0, (1.0 - p) / 2.0


@dataclass(frozen=True)
class PolarizationState:
    """Degree of polarization of the beam, P in [0, 1].

    P = 0 is an unpolarized beam (both spin components carry weight 1/2),
    P = 1 a fully polarized one.
    """

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not math.isfinite(p) or not 0.0 <= p <= 1.0:
            raise ValueError(f"degree of polarization must be in [0, 1], got {self.p!r}")
        object.__setattr__(self, "p", p)

    @property
    def rho1(self) -> float:
        return (1.0 + self.p) / 2.0

    @property
    def rho2(self) -> float:
        return (1.0 - self.p) / 2.0


@dataclass(frozen=True)
class SpacetimePoint:
    """Detection event, reduced to the single coordinate tau that the
    coherence models depend on (detector time, or any stationary label)."""

    tau: float

    def __post_init__(self):
        tau = float(self.tau)
        if not math.isfinite(tau):
            raise ValueError(f"tau must be finite, got {self.tau!r}")
        object.__setattr__(self, "tau", tau)


PointLike = Union[float, int, SpacetimePoint]


def _as_tau(point: PointLike) -> float:
    if isinstance(point, SpacetimePoint):
        return point.tau
    tau = float(point)
    if not math.isfinite(tau):
        raise ValueError(f"tau must be finite, got {point!r}")
    return tau


class CoherenceKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    LORENTZIAN = "lorentzian"
    CUSTOM = "custom"


@dataclass(frozen=True)
class CoherenceModel:
    """Pairwise complex degree of coherence gamma(p, q).

    The built-in stationary kinds depend only on the separation dt = tau_p - tau_q:

    * gaussian:    gamma = exp(-(dt / corr_time)**2)
    * lorentzian:  gamma = exp(-|dt| / corr_time)

    A custom model supplies ``gamma_fn(tau_p, tau_q) -> complex`` directly and
    is responsible for Hermiticity; matrices built from it are validated.
    """

    kind: CoherenceKind
    corr_time: float = 1.0
    gamma_fn: Optional[Callable[[float, float], complex]] = None

    def __post_init__(self):
        kind = CoherenceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        corr_time = float(self.corr_time)
        if not math.isfinite(corr_time) or corr_time <= 0.0:
            raise ValueError(f"correlation time must be positive, got {self.corr_time!r}")
        object.__setattr__(self, "corr_time", corr_time)
        if kind is CoherenceKind.CUSTOM:
            if self.gamma_fn is None:
                raise ValueError("custom coherence model requires gamma_fn")
        elif self.gamma_fn is not None:
            raise ValueError("gamma_fn is only allowed for the custom kind")

    def gamma(self, point_a: PointLike, point_b: PointLike) -> complex:
        ta, tb = _as_tau(point_a), _as_tau(point_b)
        if self.kind is CoherenceKind.GAUSSIAN:
            dt = (ta - tb) / self.corr_time
            return complex(math.exp(-dt * dt))
        if self.kind is CoherenceKind.LORENTZIAN:
            return complex(math.exp(-abs(ta - tb) / self.corr_time))
        return complex(self.gamma_fn(ta, tb))


def gaussian_model(corr_time: float = 1.0) -> CoherenceModel:
    return CoherenceModel(CoherenceKind.GAUSSIAN, corr_time)


def lorentzian_model(corr_time: float = 1.0) -> CoherenceModel:
    return CoherenceModel(CoherenceKind.LORENTZIAN, corr_time)


def custom_model(gamma_fn: Callable[[float, float], complex]) -> CoherenceModel:
    return CoherenceModel(CoherenceKind.CUSTOM, 1.0, gamma_fn)


class CoherenceMatrix:
    """Matrix of complex degrees of coherence between detection points.

    Validated on construction: Hermitian, unit diagonal, entries of modulus
    at most 1, and positive semidefinite up to eigenvalue rounding noise
    (smallest eigenvalue >= PSD_EIGENVALUE_FLOOR).  The stored array is
    exactly Hermitian with an exactly-unit diagonal and is read-only.
    The 0 x 0 matrix is allowed and behaves as the identity of restriction.
    """

    __slots__ = ("entries",)

    def __init__(self, entries):
        a = np.asarray(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"coherence matrix must be square, got shape {a.shape}")
        n = a.shape[0]
        if n:
            if not np.all(np.isfinite(a)):
                raise ValueError("coherence matrix entries must be finite")
            if np.abs(a - a.conj().T).max() > HERMITICITY_TOL:
                raise ValueError("coherence matrix is not Hermitian")
            if np.abs(np.diagonal(a) - 1.0).max() > HERMITICITY_TOL:
                raise ValueError("coherence matrix diagonal must be 1")
            if np.abs(a).max() > 1.0 + HERMITICITY_TOL:
                raise ValueError("coherence entries must have modulus at most 1")
            upper = np.triu(a, 1)
            a = upper + upper.conj().T + np.eye(n, dtype=complex)
            eigmin = float(np.linalg.eigvalsh(a).min())
            if eigmin < PSD_EIGENVALUE_FLOOR:
                raise ValueError(
                    f"coherence matrix is not positive semidefinite (eigmin={eigmin:.3e})"
                )
        a = np.ascontiguousarray(a)
        a.flags.writeable = False
        self.entries = a

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def restrict(self, indices: Iterable[int]) -> np.ndarray:
        """Submatrix on the given point indices, as a fresh writable array."""
        idx = np.asarray(list(indices), dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= self.order):
            raise ValueError(f"indices out of range for order {self.order}")
        return self.entries[np.ix_(idx, idx)].copy()

    @classmethod
    def identity(cls, order: int) -> "CoherenceMatrix":
        """Mutually incoherent points."""
        return cls(np.eye(int(order), dtype=complex))

    @classmethod
    def full_coherence(cls, order: int) -> "CoherenceMatrix":
        """All points coincident: every entry 1."""
        return cls(np.ones((int(order), int(order)), dtype=complex))

    @classmethod
    def random(cls, order: int, rng: np.random.Generator) -> "CoherenceMatrix":
        """Random valid coherence matrix (normalized complex Wishart draw)."""
        order = int(order)
        z = (rng.standard_normal((order, order)) + 1j * rng.standard_normal((order, order)))
        c = z.conj().T @ z
        d = np.sqrt(np.diagonal(c).real)
        return cls(c / np.outer(d, d))

    def __eq__(self, other):
        if not isinstance(other, CoherenceMatrix):
            return NotImplemented
        return self.order == other.order and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"CoherenceMatrix(order={self.order})"


def build_coherence_matrix(points: Sequence[PointLike], model: CoherenceModel) -> CoherenceMatrix:
    """Coherence matrix of a list of detection points under a model.

    Entry (i, j) is model.gamma(points[i], points[j]); the diagonal is 1 by
    construction.  Custom models that violate Hermiticity or positive
    semidefiniteness are rejected by the CoherenceMatrix constructor.
    """
    taus = [_as_tau(p) for p in points]
    n = len(taus)
    a = np.eye(n, dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            gij = complex(model.gamma(taus[i], taus[j]))
            gji = complex(model.gamma(taus[j], taus[i]))
            if abs(gij - gji.conjugate()) > HERMITICITY_TOL:
                raise ValueError(
                    f"coherence model is not Hermitian at points {taus[i]!r}, {taus[j]!r}"
                )
            a[i, j] = gij
            a[j, i] = gij.conjugate()
    return CoherenceMatrix(a)


@dataclass(frozen=True)
class BeamSpec:
    """Full beam description: statistics, polarization, coherence model and
    mean intensity per detection point."""

    statistics: Statistics
    polarization: PolarizationState
    coherence: CoherenceModel
    mean_intensity: float = 1.0

    def __post_init__(self):
        statistics = Statistics(self.statistics)
        if statistics is Statistics.CUSTOM:
            raise ValueError("beam statistics must be fermion or boson")
        object.__setattr__(self, "statistics", statistics)
        mean_intensity = float(self.mean_intensity)
        if not math.isfinite(mean_intensity) or mean_intensity < 0.0:
            raise ValueError(f"mean intensity must be >= 0, got {self.mean_intensity!r}")
        object.__setattr__(self, "mean_intensity", mean_intensity)
