"""Row builders for the tabular outputs (weight curve, two-detector dip
curve, correlation table).  These back both the service endpoints and the
CSV files the CLI writes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import BeamSpec, CoherenceMatrix, PolarizationState
from .kernels import PolarizedKernel
from .partition import (
    correlation_enumeration,
    correlation_grouped,
    two_particle_closed_form,
    weight_factor,
)


def float_grid(start: float, step: float, stop: float) -> list:
    """Inclusive arithmetic grid.  The last point is clamped to ``stop`` so
    accumulated rounding can never push it past the requested endpoint."""
    start, step, stop = float(start), float(step), float(stop)
    if not all(map(math.isfinite, (start, step, stop))):
        raise ValueError("grid bounds must be finite")
    if step <= 0.0:
        raise ValueError(f"grid step must be positive, got {step!r}")
    if stop < start:
        raise ValueError(f"grid stop {stop!r} is below start {start!r}")
    grid = np.arange(start, stop + 0.5 * step, step)
    return [float(v) for v in np.minimum(grid, stop)]


def weight_curve_rows(k: int, p_values: Sequence[float]) -> list:
    """(P, w) pairs of the order-k weight factor over a polarization grid."""
    return [(float(p), weight_factor(k, p)) for p in p_values]


def dip_curve_rows(beam: BeamSpec, separations: Sequence[float]) -> list:
    """(delta_tau, O2_normalized) pairs for two detectors at separation
    delta_tau.  Normalized by the product of mean intensities, so the value
    is 1 at large separation and dips (fermions) or peaks (bosons) at zero."""
    pol = beam.polarization
    rows = []
    for d in separations:
        d = float(d)
        g = beam.coherence.gamma(0.0, d)
        value = two_particle_closed_form(pol, abs(g) ** 2, 1.0, 1.0, beam.statistics)
        rows.append((d, value))
    return rows


@dataclass(frozen=True)
class CorrelationTableRow:
    k: int
    p: float
    o_enumeration: float
    o_grouped: float
    rel_diff: float


def correlation_table_rows(
    k_max: int,
    p_values: Sequence[float],
    kernel: PolarizedKernel,
    gamma: CoherenceMatrix,
    intensities: Optional[Sequence[float]] = None,
) -> list:
    """Correlations of the first k detection points for every k up to
    ``k_max`` and every polarization, computed by both partition routes.
    ``rel_diff`` is |enumeration - grouped| / max(1, |enumeration|)."""
    k_max = int(k_max)
    if k_max < 1:
        raise ValueError(f"k must be >= 1, got {k_max}")
    rows = []
    for k in range(1, k_max + 1):
        for p in p_values:
            pol = PolarizationState(float(p))
            enum_res = correlation_enumeration(k, pol, kernel, gamma, intensities)
            grp_res = correlation_grouped(k, pol, kernel, gamma, intensities)
            rel = abs(enum_res.value - grp_res.value) / max(1.0, abs(enum_res.value))
            rows.append(CorrelationTableRow(k, pol.p, enum_res.value, grp_res.value, rel))
    return rows
