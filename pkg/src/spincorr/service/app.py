"""FastAPI application exposing the correlation engine.

Every endpoint is a stateless POST mapping a request model onto the core
package.  Domain errors (ValueError) become HTTP 400 with a detail string;
malformed request bodies are rejected by pydantic as HTTP 422.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..core import (
    BeamSpec,
    CoherenceMatrix,
    PolarizationState,
    Statistics,
    build_coherence_matrix,
    gaussian_model,
    lorentzian_model,
)
from ..curves import correlation_table_rows, dip_curve_rows, float_grid, weight_curve_rows
from ..kernels import boson_kernel, fermion_kernel
from ..partition import Method, correlation_enumeration, correlation_grouped
from ..verify import (
    BosonVerifyConfig,
    FermionVerifyConfig,
    run_boson_verify,
    run_fermion_verify,
)
from . import schemas


def _model_from_spec(spec: schemas.CoherenceSpec):
    if spec.kind == "gaussian":
        return gaussian_model(spec.tau_c)
    return lorentzian_model(spec.tau_c)


def _kernel_for(statistics: str):
    if statistics == "fermion":
        return fermion_kernel()
    return boson_kernel()


def _matrix_from_payload(payload: schemas.MatrixPayload) -> CoherenceMatrix:
    rows = [[complex(re, im) for re, im in row] for row in payload.entries]
    return CoherenceMatrix(np.asarray(rows, dtype=complex))


def _resolve_gamma(req) -> CoherenceMatrix:
    if req.matrix is not None and req.points is not None:
        raise ValueError("supply either an explicit matrix or points, not both")
    if req.matrix is not None:
        return _matrix_from_payload(req.matrix)
    if req.points is not None:
        return build_coherence_matrix(req.points, _model_from_spec(req.coherence))
    raise ValueError("either an explicit matrix or a list of points is required")


def _finite(x: float) -> float:
    # JSON cannot carry inf/nan; saturate instead of dropping the field.
    if math.isfinite(x):
        return x
    if math.isnan(x):
        return 0.0
    return math.copysign(1e308, x)


def create_app() -> FastAPI:
    app = FastAPI(title="spincorr", version=__version__)

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    async def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/weight-curve", response_model=schemas.WeightCurveResponse)
    async def weight_curve(req: schemas.WeightCurveRequest):
        grid = float_grid(req.p_grid.start, req.p_grid.step, req.p_grid.stop)
        rows = weight_curve_rows(req.k, grid)
        return schemas.WeightCurveResponse(
            k=req.k, rows=[schemas.WeightCurveRow(p=p, w=w) for p, w in rows]
        )

    @app.post("/dip-curve", response_model=schemas.DipCurveResponse)
    async def dip_curve(req: schemas.DipCurveRequest):
        model = _model_from_spec(req.coherence)
        beam = BeamSpec(Statistics(req.statistics), PolarizationState(req.p), model)
        max_sep = 5.0 * model.corr_time if req.max_separation is None else float(req.max_separation)
        if not math.isfinite(max_sep) or max_sep <= 0.0:
            raise ValueError(f"max_separation must be positive, got {req.max_separation!r}")
        if req.n_points < 2:
            raise ValueError(f"n_points must be >= 2, got {req.n_points}")
        separations = [float(d) for d in np.linspace(0.0, max_sep, req.n_points)]
        rows = dip_curve_rows(beam, separations)
        return schemas.DipCurveResponse(
            statistics=req.statistics,
            p=req.p,
            rows=[schemas.DipCurveRow(delta_tau=d, o2_normalized=v) for d, v in rows],
        )

    @app.post("/corr-table", response_model=schemas.CorrelationTableResponse)
    async def corr_table(req: schemas.CorrelationTableRequest):
        gamma = _resolve_gamma(req)
        k = gamma.order if req.k is None else req.k
        rows = correlation_table_rows(
            k, req.p_values, _kernel_for(req.statistics), gamma, req.intensities
        )
        return schemas.CorrelationTableResponse(
            statistics=req.statistics,
            rows=[
                schemas.CorrelationTableRow(
                    k=r.k,
                    p=r.p,
                    o_enumeration=r.o_enumeration,
                    o_grouped=r.o_grouped,
                    rel_diff=r.rel_diff,
                )
                for r in rows
            ],
        )

    @app.post("/correlation", response_model=schemas.CorrelationResponse)
    async def correlation(req: schemas.CorrelationRequest):
        gamma = _resolve_gamma(req)
        k = gamma.order if req.k is None else req.k
        pol = PolarizationState(req.p)
        kernel = _kernel_for(req.statistics)
        routes = {
            "enumeration": (correlation_enumeration,),
            "grouped": (correlation_grouped,),
            "both": (correlation_enumeration, correlation_grouped),
        }[req.method]
        results = [fn(k, pol, kernel, gamma, req.intensities) for fn in routes]
        return schemas.CorrelationResponse(
            results=[
                schemas.CorrelationValue(
                    value=r.value,
                    k=r.k,
                    method=r.method.value,
                    statistics=r.statistics.value,
                    term_count=r.term_count,
                )
                for r in results
            ]
        )

    @app.post("/verify/fermion", response_model=schemas.FermionVerifyResponse)
    async def verify_fermion(req: schemas.FermionVerifyRequest):
        report = run_fermion_verify(
            FermionVerifyConfig(
                instances=req.instances,
                max_modes=req.max_modes,
                max_order=req.max_order,
                seed=req.seed,
                corrupt_kernel=req.corrupt_kernel,
            )
        )
        return schemas.FermionVerifyResponse(
            passed=report.passed,
            tolerance=report.tolerance,
            max_deviation=report.max_deviation,
            cases=[
                schemas.FermionVerifyCase(
                    index=c.index,
                    n_modes=c.n_modes,
                    order=c.order,
                    oracle_value=c.oracle_value,
                    kernel_value=c.kernel_value,
                    deviation=c.deviation,
                    passed=c.passed,
                )
                for c in report.cases
            ],
        )

    @app.post("/verify/boson", response_model=schemas.BosonVerifyResponse)
    async def verify_boson(req: schemas.BosonVerifyRequest):
        report = run_boson_verify(
            BosonVerifyConfig(
                samples=req.samples,
                seed=req.seed,
                workers=req.workers,
                orders=req.orders,
                polarizations=req.polarizations,
                corrupt_kernel=req.corrupt_kernel,
            )
        )
        return schemas.BosonVerifyResponse(
            passed=report.passed,
            threshold=report.threshold,
            max_abs_z=_finite(report.max_abs_z),
            cases=[
                schemas.BosonVerifyCase(
                    order=c.order,
                    polarization=c.polarization,
                    matrix_kind=c.matrix_kind,
                    closed_form=c.closed_form,
                    estimate=c.estimate,
                    std_error=_finite(c.std_error),
                    z_score=_finite(c.z_score),
                    rel_error=c.rel_error,
                    passed=c.passed,
                )
                for c in report.cases
            ],
        )

    return app


app = create_app()
