"""Request and response models for the REST service.

Complex matrix entries travel as [real, imag] pairs.  Every numeric field
that reaches the core layer is re-validated there, so these models only pin
shapes, defaults and enumerations.
"""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field

ComplexPair = Tuple[float, float]


class GridSpec(BaseModel):
    start: float = 0.0
    step: float = 0.01
    stop: float = 1.0


class CoherenceSpec(BaseModel):
    kind: Literal["gaussian", "lorentzian"] = "gaussian"
    tau_c: float = 1.0


class MatrixPayload(BaseModel):
    entries: List[List[ComplexPair]]


class WeightCurveRequest(BaseModel):
    k: int = 10
    p_grid: GridSpec = Field(default_factory=GridSpec)


class WeightCurveRow(BaseModel):
    p: float
    w: float


class WeightCurveResponse(BaseModel):
    k: int
    rows: List[WeightCurveRow]


class DipCurveRequest(BaseModel):
    statistics: Literal["fermion", "boson"] = "fermion"
    p: float = 0.0
    coherence: CoherenceSpec = Field(default_factory=CoherenceSpec)
    max_separation: Optional[float] = None  # defaults to 5 * tau_c
    n_points: int = 101


class DipCurveRow(BaseModel):
    delta_tau: float
    o2_normalized: float


class DipCurveResponse(BaseModel):
    statistics: str
    p: float
    rows: List[DipCurveRow]


class CorrelationTableRequest(BaseModel):
    statistics: Literal["fermion", "boson"] = "fermion"
    k: Optional[int] = None  # defaults to the number of points
    p_values: List[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    matrix: Optional[MatrixPayload] = None
    points: Optional[List[float]] = None
    coherence: CoherenceSpec = Field(default_factory=CoherenceSpec)
    intensities: Optional[List[float]] = None


class CorrelationTableRow(BaseModel):
    k: int
    p: float
    o_enumeration: float
    o_grouped: float
    rel_diff: float


class CorrelationTableResponse(BaseModel):
    statistics: str
    rows: List[CorrelationTableRow]


class CorrelationRequest(BaseModel):
    statistics: Literal["fermion", "boson"] = "fermion"
    p: float = 0.0
    k: Optional[int] = None
    matrix: Optional[MatrixPayload] = None
    points: Optional[List[float]] = None
    coherence: CoherenceSpec = Field(default_factory=CoherenceSpec)
    intensities: Optional[List[float]] = None
    method: Literal["enumeration", "grouped", "both"] = "both"


class CorrelationValue(BaseModel):
    value: float
    k: int
    method: str
    statistics: str
    term_count: int


class CorrelationResponse(BaseModel):
    results: List[CorrelationValue]


class FermionVerifyRequest(BaseModel):
    instances: int = 200
    max_modes: int = 6
    max_order: int = 3
    seed: int = 12345
    corrupt_kernel: bool = False


class FermionVerifyCase(BaseModel):
    index: int
    n_modes: int
    order: int
    oracle_value: float
    kernel_value: float
    deviation: float
    passed: bool


class FermionVerifyResponse(BaseModel):
    passed: bool
    tolerance: float
    max_deviation: float
    cases: List[FermionVerifyCase]


class BosonVerifyRequest(BaseModel):
    samples: int = 1_000_000
    seed: int = 12345
    workers: int = 1
    orders: List[int] = Field(default_factory=lambda: [2, 3])
    polarizations: List[float] = Field(default_factory=lambda: [0.0, 0.6, 1.0])
    corrupt_kernel: bool = False


class BosonVerifyCase(BaseModel):
    order: int
    polarization: float
    matrix_kind: str
    closed_form: float
    estimate: float
    std_error: float
    z_score: float
    rel_error: float
    passed: bool


class BosonVerifyResponse(BaseModel):
    passed: bool
    threshold: float
    max_abs_z: float
    cases: List[BosonVerifyCase]


class HealthResponse(BaseModel):
    status: str
    version: str
