"""Correlation functions of partially polarized chaotic beams.

Core objects: polarization and coherence types (core), determinant/permanent
linear algebra (linalg), single-component kernels (kernels), spin-partition
sums (partition), brute-force oracles (oracles), self-verification suites
(verify).  A FastAPI service (spincorr.service) wraps the engine and the
``spincorr`` CLI is a thin client of that service.
"""

from .core import (
    BeamSpec,
    CoherenceKind,
    CoherenceMatrix,
    CoherenceModel,
    PolarizationState,
    SpacetimePoint,
    Statistics,
    build_coherence_matrix,
    custom_model,
    gaussian_model,
    lorentzian_model,
    rho_from_P,
)
from .kernels import PolarizedKernel, boson_G, boson_kernel, custom_kernel, fermion_G, fermion_kernel
from .linalg import determinant, determinant_naive, permanent, permanent_naive
from .oracles import (
    MCConfig,
    MCEstimate,
    ModeBasis,
    draw_field_components,
    fock_oracle_fermion,
    mc_oracle_boson,
)
from .partition import (
    CorrelationResult,
    Method,
    PartitionTerm,
    correlation_enumeration,
    correlation_grouped,
    partition_terms,
    two_particle_closed_form,
    weight_factor,
)

__version__ = "0.1.0"

__all__ = [
    "BeamSpec",
    "CoherenceKind",
    "CoherenceMatrix",
    "CoherenceModel",
    "CorrelationResult",
    "MCConfig",
    "MCEstimate",
    "Method",
    "ModeBasis",
    "PartitionTerm",
    "PolarizationState",
    "PolarizedKernel",
    "SpacetimePoint",
    "Statistics",
    "boson_G",
    "boson_kernel",
    "build_coherence_matrix",
    "custom_kernel",
    "custom_model",
    "determinant",
    "determinant_naive",
    "draw_field_components",
    "fermion_G",
    "fermion_kernel",
    "fock_oracle_fermion",
    "gaussian_model",
    "lorentzian_model",
    "mc_oracle_boson",
    "partition_terms",
    "permanent",
    "permanent_naive",
    "rho_from_P",
    "two_particle_closed_form",
    "weight_factor",
    "__version__",
]
