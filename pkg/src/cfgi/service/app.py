"""FastAPI application exposing the simulator.

Endpoints wrap the core package one to one: /probs evaluates a single
protocol configuration, /sweep produces the metric grid, /image runs a
Monte Carlo exposure plus reconstruction. Domain validation failures
(ValueError from the core) surface as 422 responses with a detail string,
matching the schema-validation status FastAPI already uses.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..engine import ProtocolParams, run_protocol
from ..imaging import Mask, SourceModel, dose_map, reconstruct, simulate_exposure
from ..metrics import metric_point
from ..polarization import Transmittance
from .models import (
    HealthResponse,
    ImageRequest,
    ImageResponse,
    LossesEcho,
    MaskPayload,
    ProbsRequest,
    ProbsResponse,
    SweepRequest,
    SweepResponse,
    SweepRow,
)

__all__ = ["create_app", "app"]


def _request_transmittance(req: ProbsRequest) -> Transmittance:
    if req.blocked:
        return Transmittance.blocked()
    if req.open:
        return Transmittance.open_channel()
    return Transmittance.from_abs_phase(req.t_abs, req.t_phase or 0.0)


def _mask_from_payload(payload: MaskPayload) -> Mask:
    magnitude = np.asarray(payload.magnitude, dtype=float)
    phase = None if payload.phase is None else np.asarray(payload.phase, dtype=float)
    return Mask.from_magnitude(magnitude, phase)


def create_app() -> FastAPI:
    app = FastAPI(
        title="cfgi",
        version=__version__,
        description="Counterfactual ghost imaging simulator service.",
    )

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/healthz", response_model=HealthResponse)
    def healthz() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/probs", response_model=ProbsResponse)
    def probs(req: ProbsRequest) -> ProbsResponse:
        params = req.resolve_params()
        t = _request_transmittance(req)
        dist = run_protocol(params, t)
        return ProbsResponse(
            m=params.outer_cycles,
            n=params.inner_cycles,
            outer_rotation=params.outer_rotation,
            inner_rotation=params.inner_rotation,
            losses=LossesEcho.of(params.losses),
            t_abs=abs(t.value),
            t_phase=math.atan2(t.value.imag, t.value.real),
            p_d0=dist.p_d0,
            p_d1=dist.p_d1,
            p_dl=dist.p_dl,
            p_object=dist.p_object,
            p_component=dist.p_component,
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(req: SweepRequest) -> SweepResponse:
        losses = req.resolve_losses()
        rows = []
        for m in range(req.m_min, req.m_max + 1):
            for n in range(req.n_min, req.n_max + 1):
                params = ProtocolParams(outer_cycles=m, inner_cycles=n, losses=losses)
                point = metric_point(
                    params,
                    reassign_dl=req.reassign_dl,
                    noise_model=req.noise_model,
                )
                rows.append(SweepRow(
                    m=point.outer_cycles,
                    n=point.inner_cycles,
                    p_int=point.p_int,
                    p_d0_err=point.p_d0_err,
                    f=point.snr_cgi_factor,
                    snr_int_ratio=(None if math.isinf(point.snr_int_ratio)
                                   else point.snr_int_ratio),
                    visibility=point.visibility,
                ))
        return SweepResponse(
            reassign_dl=req.reassign_dl,
            noise_model=req.noise_model,
            losses=LossesEcho.of(losses),
            rows=rows,
        )

    @app.post("/image", response_model=ImageResponse)
    def image(req: ImageRequest) -> ImageResponse:
        params = req.resolve_params()
        heralding = (req.heralding if req.heralding is not None
                     else params.losses.heralding_efficiency)
        source = SourceModel(
            n_bar=req.n_bar,
            heralding_efficiency=heralding,
            seed=req.seed,
            correlation_blur_px=req.blur,
        )
        mask = _mask_from_payload(req.mask)
        counts = simulate_exposure(mask, params, source, reassign_dl=req.reassign_dl)
        estimate = reconstruct(counts)
        dose = dose_map(mask, params, source)
        return ImageResponse(
            width=mask.width,
            height=mask.height,
            m=params.outer_cycles,
            n=params.inner_cycles,
            n_bar=source.n_bar,
            seed=source.seed,
            heralding=source.heralding_efficiency,
            blur=source.correlation_blur_px,
            reassign_dl=req.reassign_dl,
            c_d0=counts.c_d0.tolist(),
            c_d1=counts.c_d1.tolist(),
            c_dl=counts.c_dl.tolist(),
            d=estimate.d.tolist(),
            threshold_map=estimate.threshold_map.tolist(),
            dose=dose.tolist(),
            expected_d_blocked=estimate.expected_d_blocked,
            expected_d_open=estimate.expected_d_open,
            threshold_value=estimate.threshold_value,
            ambiguous=estimate.ambiguous,
        )

    return app


app = create_app()
