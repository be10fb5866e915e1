"""Correlation kernels of a fully polarized chaotic beam.

For k detection events drawn from a single spin component, the k-fold
coincidence density factorizes into the product of one-point intensities
times a matrix function of the coherence submatrix: a determinant for
fermions (antibunching) and a permanent for bosons (bunching).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .core import CoherenceMatrix, Statistics
from .linalg import determinant, permanent, real_part

KernelFn = Callable[[tuple, CoherenceMatrix, Optional[Sequence[float]]], float]


def _resolve_subset(subset: Iterable[int], order: int) -> tuple:
    idx = sorted(int(i) for i in subset)
    for i in idx:
        if not 0 <= i < order:
            raise ValueError(f"point index {i} out of range for order {order}")
    if len(set(idx)) != len(idx):
        raise ValueError(f"point indices must be distinct, got {tuple(idx)}")
    return tuple(idx)


def _intensity_product(indices: tuple, intensities: Optional[Sequence[float]]) -> float:
    if intensities is None:
        return 1.0
    prod = 1.0
    for i in indices:
        v = float(intensities[i])
        if not math.isfinite(v) or v < 0.0:
            raise ValueError(f"intensities must be finite and >= 0, got {intensities[i]!r}")
        prod *= v
    return prod


def fermion_G(subset, gamma: CoherenceMatrix, intensities=None) -> float:
    """Fully polarized fermion correlation over the given point subset.

    Product of the one-point intensities times det of the coherence
    submatrix.  The empty subset gives exactly 1.0.  A tiny imaginary
    residue from the determinant is dropped; a non-negligible one raises.
    """
    idx = _resolve_subset(subset, gamma.order)
    if not idx:
        return 1.0
    d = determinant(gamma.restrict(idx))
    return _intensity_product(idx, intensities) * real_part(d)


def boson_G(subset, gamma: CoherenceMatrix, intensities=None) -> float:
    """Fully polarized boson correlation: permanent instead of determinant."""
    idx = _resolve_subset(subset, gamma.order)
    if not idx:
        return 1.0
    p = permanent(gamma.restrict(idx))
    return _intensity_product(idx, intensities) * real_part(p)


@dataclass(frozen=True)
class PolarizedKernel:
    """Single-spin-component correlation function G.

    ``evaluate`` normalizes the subset (sorted, duplicates rejected) before
    dispatching, so the value depends only on which points are in the subset,
    never on the order they were passed in.  G of the empty subset is 1.0.
    """

    statistics: Statistics
    fn: KernelFn

    def evaluate(self, subset, gamma: CoherenceMatrix, intensities=None) -> float:
        idx = _resolve_subset(subset, gamma.order)
        if not idx:
            return 1.0
        return float(self.fn(idx, gamma, intensities))


def fermion_kernel() -> PolarizedKernel:
    return PolarizedKernel(Statistics.FERMION, fermion_G)


def boson_kernel() -> PolarizedKernel:
    return PolarizedKernel(Statistics.BOSON, boson_G)


def custom_kernel(fn: KernelFn) -> PolarizedKernel:
    """Wrap an arbitrary subset function; used for cross-checks and fault
    injection in the verification suites."""
    return PolarizedKernel(Statistics.CUSTOM, fn)
