"""Spin-partition sums for partially polarized beams.

With two spin components of weights rho1 and rho2, each of the k detection
events independently belongs to one component.  The full correlation is the
probability-weighted sum over the 2^k spin assignments, each term the product
of the single-component kernel over the "up" subset and over its complement:

    O = sum over subsets S of rho1^|S| rho2^(k-|S|) G(S) G(S complement)

Because swapping the two components maps S to its complement, the terms pair
up and the sum collapses to 2^(k-1) unordered splits {S, complement} with
coefficient rho1^n1 rho2^n2 + rho1^n2 rho2^n1 (n1 = |S|, n2 = k - n1).  Both
routes are implemented and must agree to rounding precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .core import CoherenceMatrix, PolarizationState, Statistics, rho_from_P
from .kernels import PolarizedKernel

# 2^20 kernel evaluations per call is the practical ceiling.
MAX_PARTITION_ORDER = 20


class Method(str, enum.Enum):
    ENUMERATION = "enumeration"
    GROUPED = "grouped"
    TWO_PARTICLE_CLOSED_FORM = "two-particle-closed-form"


@dataclass(frozen=True)
class PartitionTerm:
    """One spin assignment: the points in the first ("up") component, the
    component sizes, and the probability weight rho1^n1 * rho2^n2."""

    subset_up: tuple
    n1: int
    n2: int
    weight: float


@dataclass(frozen=True)
class CorrelationResult:
    value: float
    k: int
    method: Method
    statistics: Statistics
    term_count: int


def _validate_k(k, gamma: CoherenceMatrix) -> int:
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > MAX_PARTITION_ORDER:
        raise ValueError(f"k={k} exceeds partition cap {MAX_PARTITION_ORDER}")
    if k > gamma.order:
        raise ValueError(f"k={k} exceeds coherence matrix order {gamma.order}")
    return k


def _rho_powers(pol: PolarizationState, k: int) -> tuple:
    pw1 = [1.0] * (k + 1)
    pw2 = [1.0] * (k + 1)
    for n in range(1, k + 1):
        pw1[n] = pw1[n - 1] * pol.rho1
        pw2[n] = pw2[n - 1] * pol.rho2
    return pw1, pw2


def _mask_indices(mask: int, k: int) -> tuple:
    return tuple(i for i in range(k) if (mask >> i) & 1)


def partition_terms(k: int, pol: PolarizationState) -> Iterator[PartitionTerm]:
    """All 2^k spin assignments of points 0..k-1, in binary-counting order
    of the "up" subset.  The weights sum to exactly 1 over the iterator."""
    if int(k) < 0 or int(k) > MAX_PARTITION_ORDER:
        raise ValueError(f"k must be in [0, {MAX_PARTITION_ORDER}], got {k}")
    k = int(k)
    pw1, pw2 = _rho_powers(pol, k)
    for mask in range(1 << k):
        n1 = mask.bit_count()
        yield PartitionTerm(_mask_indices(mask, k), n1, k - n1, pw1[n1] * pw2[k - n1])


def _kernel_cache(kernel: PolarizedKernel, gamma, intensities, k: int):
    cache = {}

    def g(mask: int) -> float:
        v = cache.get(mask)
        if v is None:
            v = kernel.evaluate(_mask_indices(mask, k), gamma, intensities)
            cache[mask] = v
        return v

    return g


def correlation_enumeration(
    k: int,
    pol: PolarizationState,
    kernel: PolarizedKernel,
    gamma: CoherenceMatrix,
    intensities: Optional[Sequence[float]] = None,
) -> CorrelationResult:
    """Correlation of points 0..k-1 by direct sum over all 2^k assignments."""
    k = _validate_k(k, gamma)
    pw1, pw2 = _rho_powers(pol, k)
    g = _kernel_cache(kernel, gamma, intensities, k)
    full = (1 << k) - 1
    total = 0.0
    for mask in range(1 << k):
        n1 = mask.bit_count()
        total += pw1[n1] * pw2[k - n1] * g(mask) * g(full ^ mask)
    return CorrelationResult(total, k, Method.ENUMERATION, kernel.statistics, 1 << k)


def correlation_grouped(
    k: int,
    pol: PolarizationState,
    kernel: PolarizedKernel,
    gamma: CoherenceMatrix,
    intensities: Optional[Sequence[float]] = None,
) -> CorrelationResult:
    """Correlation by the collapsed sum over unordered splits {S, complement}.

    The canonical representative of each split is the subset containing
    point 0, so exactly 2^(k-1) terms are evaluated, each with coefficient
    rho1^n1 rho2^n2 + rho1^n2 rho2^n1.
    """
    k = _validate_k(k, gamma)
    pw1, pw2 = _rho_powers(pol, k)
    g = _kernel_cache(kernel, gamma, intensities, k)
    full = (1 << k) - 1
    total = 0.0
    for mask in range(1, 1 << k, 2):  # bit 0 set: subset contains point 0
        n1 = mask.bit_count()
        n2 = k - n1
        coeff = pw1[n1] * pw2[n2] + pw1[n2] * pw2[n1]
        total += coeff * g(mask) * g(full ^ mask)
    return CorrelationResult(total, k, Method.GROUPED, kernel.statistics, 1 << (k - 1))


def two_particle_closed_form(
    pol: PolarizationState,
    gamma12_abs2: float,
    intensity1: float = 1.0,
    intensity2: float = 1.0,
    statistics: Statistics = Statistics.FERMION,
) -> float:
    """Two-point correlation in closed form.

    O = I1 I2 (1 -+ (1 + P^2)/2 * |gamma12|^2), minus sign for fermions,
    plus for bosons.  ``gamma12_abs2`` is the squared modulus |gamma12|^2.
    """
    g2 = float(gamma12_abs2)
    if not math.isfinite(g2) or not 0.0 <= g2 <= 1.0:
        raise ValueError(f"|gamma12|^2 must be in [0, 1], got {gamma12_abs2!r}")
    i1, i2 = float(intensity1), float(intensity2)
    for v in (i1, i2):
        if not math.isfinite(v) or v < 0.0:
            raise ValueError(f"intensities must be finite and >= 0, got {v!r}")
    statistics = Statistics(statistics)
    if statistics is Statistics.FERMION:
        sign = -1.0
    elif statistics is Statistics.BOSON:
        sign = 1.0
    else:
        raise ValueError("closed form is defined for fermion or boson statistics")
    spin_factor = (1.0 + pol.p * pol.p) / 2.0  # rho1^2 + rho2^2
    return i1 * i2 * (1.0 + sign * spin_factor * g2)


def weight_factor(k: int, p) -> float:
    """Magnitude w = rho1^k + rho2^k of the fully-coherent correlation
    structure at order k; the prefactor that suppresses k-point bunching
    and antibunching features as polarization decreases."""
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    rho1, rho2 = rho_from_P(p)
    return rho1**k + rho2**k
