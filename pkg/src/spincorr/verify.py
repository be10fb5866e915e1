"""Self-verification suites.

Fermion suite: the determinant kernel against the exact Fock-space oracle on
randomized mode systems.  Boson suite: the grouped partition sum with the
permanent kernel against the Gaussian-field Monte Carlo oracle, judged by
z-score.  Both accept a fault-injection switch that perturbs the kernel so a
broken comparison is demonstrably caught.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import CoherenceMatrix, PolarizationState
from .kernels import boson_G, custom_kernel, fermion_G, boson_kernel
from .oracles import MAX_FOCK_MODES, MAX_FOCK_ORDER, MCConfig, ModeBasis, fock_oracle_fermion, mc_oracle_boson
from .partition import correlation_grouped

DEFAULT_SEED = 12345
FERMION_DEVIATION_TOL = 1e-10
BOSON_Z_THRESHOLD = 3.0
# Fault-injection sizes: far above each suite's detection floor (1e-10
# deviation tolerance, respectively a few-sigma Monte Carlo resolution).
_FERMION_CORRUPTION = 1.0 + 1e-5
_BOSON_CORRUPTION = 1.1


@dataclass(frozen=True)
class FermionVerifyConfig:
    instances: int = 200
    max_modes: int = 6
    max_order: int = MAX_FOCK_ORDER
    seed: int = DEFAULT_SEED
    corrupt_kernel: bool = False

    def __post_init__(self):
        if int(self.instances) < 1:
            raise ValueError("instances must be >= 1")
        if not 1 <= int(self.max_modes) <= MAX_FOCK_MODES:
            raise ValueError(f"max_modes must be in [1, {MAX_FOCK_MODES}]")
        if not 1 <= int(self.max_order) <= MAX_FOCK_ORDER:
            raise ValueError(f"max_order must be in [1, {MAX_FOCK_ORDER}]")


@dataclass(frozen=True)
class FermionCase:
    index: int
    n_modes: int
    order: int
    oracle_value: float
    kernel_value: float
    deviation: float

    @property
    def passed(self) -> bool:
        return self.deviation <= FERMION_DEVIATION_TOL


@dataclass(frozen=True)
class FermionVerifyReport:
    cases: tuple
    tolerance: float
    max_deviation: float
    passed: bool


def run_fermion_verify(config: FermionVerifyConfig = FermionVerifyConfig()) -> FermionVerifyReport:
    """Compare det-kernel correlations against the Fock oracle on random
    mode systems.  Deviation metric: |kernel - oracle| / (1 + |oracle|)."""
    rng = np.random.default_rng(int(config.seed))
    cases = []
    for i in range(int(config.instances)):
        n_modes = int(rng.integers(1, config.max_modes + 1))
        order = int(rng.integers(1, min(config.max_order, n_modes) + 1))
        occ = rng.uniform(0.1, 0.9, n_modes)
        phi = (
            rng.standard_normal((n_modes, order)) + 1j * rng.standard_normal((n_modes, order))
        ) / math.sqrt(2.0)
        basis = ModeBasis(phi, occ)
        oracle = fock_oracle_fermion(basis, range(order))
        gamma, intens = basis.coherence()
        value = fermion_G(range(order), gamma, intens)
        if config.corrupt_kernel:
            value *= _FERMION_CORRUPTION
        deviation = abs(value - oracle) / (1.0 + abs(oracle))
        cases.append(FermionCase(i, n_modes, order, oracle, value, deviation))
    max_dev = max(c.deviation for c in cases)
    return FermionVerifyReport(
        tuple(cases), FERMION_DEVIATION_TOL, max_dev, max_dev <= FERMION_DEVIATION_TOL
    )


@dataclass(frozen=True)
class BosonVerifyConfig:
    samples: int = 1_000_000
    seed: int = DEFAULT_SEED
    workers: int = 1
    orders: Sequence[int] = (2, 3)
    polarizations: Sequence[float] = (0.0, 0.6, 1.0)
    corrupt_kernel: bool = False

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(k) for k in self.orders))
        object.__setattr__(self, "polarizations", tuple(float(p) for p in self.polarizations))
        if not self.orders or not self.polarizations:
            raise ValueError("orders and polarizations must be non-empty")


@dataclass(frozen=True)
class BosonCase:
    order: int
    polarization: float
    matrix_kind: str
    closed_form: float
    estimate: float
    std_error: float
    z_score: float
    rel_error: float

    @property
    def passed(self) -> bool:
        return abs(self.z_score) <= BOSON_Z_THRESHOLD


@dataclass(frozen=True)
class BosonVerifyReport:
    cases: tuple
    threshold: float
    max_abs_z: float
    passed: bool


def _corruptible_boson_kernel(corrupt: bool):
    if not corrupt:
        return boson_kernel()
    return custom_kernel(
        lambda subset, gamma, intens: boson_G(subset, gamma, intens) * _BOSON_CORRUPTION
    )


def run_boson_verify(config: BosonVerifyConfig = BosonVerifyConfig()) -> BosonVerifyReport:
    """Compare the grouped permanent-kernel sum against Monte Carlo sampling.

    For each order the suite uses the fully coherent matrix plus one random
    coherence matrix, across the configured polarizations.  A case passes
    when |estimate - closed form| <= 3 standard errors.
    """
    matrix_rng = np.random.default_rng(int(config.seed))
    kernel = _corruptible_boson_kernel(config.corrupt_kernel)
    cases = []
    case_index = 0
    for k in config.orders:
        matrices = [
            ("full-coherence", CoherenceMatrix.full_coherence(k)),
            ("random-psd", CoherenceMatrix.random(k, matrix_rng)),
        ]
        for kind, gamma in matrices:
            for p in config.polarizations:
                pol = PolarizationState(p)
                closed = correlation_grouped(k, pol, kernel, gamma).value
                mc_cfg = MCConfig(
                    samples=config.samples,
                    seed=(int(config.seed) + 7919 * case_index) % 2**64,
                    workers=config.workers,
                )
                case_index += 1
                est, se = mc_oracle_boson(pol, gamma, None, k, mc_cfg)
                diff = est - closed
                if se > 0:
                    z = diff / se
                else:
                    z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
                rel = abs(diff) / abs(closed)
                cases.append(BosonCase(k, pol.p, kind, closed, est, se, z, rel))
    max_z = max(abs(c.z_score) for c in cases)
    return BosonVerifyReport(tuple(cases), BOSON_Z_THRESHOLD, max_z, max_z <= BOSON_Z_THRESHOLD)
