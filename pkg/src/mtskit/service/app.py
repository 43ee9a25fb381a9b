"""FastAPI service wrapping the transform, simulator, cost, and harness
operations.  The CLI is a thin client of these endpoints; the service can
equally serve remote verification clients via `mtskit serve`."""

from __future__ import annotations

import base64

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..coeff import TransformKind, integer_matrix, pack_rom
from ..cost import architecture_cost, fps_estimate, fps_report
from ..harness import Campaign, export_golden, run_selfcheck
from ..pipeline import HORIZONTAL, VERTICAL, MtsDatapath, PassResult
from ..transform import forward_2d, inverse_2d
from .schemas import (
    CampaignRequest,
    CampaignResponse,
    CostResponse,
    CycleReportModel,
    FpsResponse,
    GoldenExportRequest,
    GoldenExportResponse,
    HealthResponse,
    MatrixResponse,
    PassModel,
    RomResponse,
    SimulateRequest,
    SimulateResponse,
    TraceRowModel,
    TransformRequest,
    TransformResponse,
)

app = FastAPI(
    title="mtskit",
    version=__version__,
    description="Bit-exact multiple-transform-selection inverse transform service.",
)


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


def _report_model(report) -> CycleReportModel:
    return CycleReportModel(
        total_cycles=report.total_cycles,
        latency_cycles=report.latency_cycles,
        throughput_px_per_cycle=float(report.throughput_px_per_cycle),
        input_rate_px_per_cycle=float(report.input_rate_px_per_cycle),
    )


def _pass_model(direction: str, result: PassResult) -> PassModel:
    slot_total = result.report.total_cycles - result.report.latency_cycles
    return PassModel(
        direction=direction,
        vector_count=len(result.outputs),
        pass_cycles=slot_total,
        report=_report_model(result.report),
        max_mults_per_cycle=result.max_mults_per_cycle,
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/transform", response_model=TransformResponse)
def transform(req: TransformRequest) -> TransformResponse:
    try:
        spec = req.spec.to_spec()
        samples = np.array(req.samples, dtype=np.int64)
        if req.forward:
            block = forward_2d(spec, samples)
            clips = 0
        else:
            block, clips = inverse_2d(spec, samples, return_stats=True)
    except ValueError as exc:
        raise _bad_request(exc) from None
    return TransformResponse(
        samples=block.samples.tolist(),
        width=block.width,
        height=block.height,
        min_value=int(block.samples.min()),
        max_value=int(block.samples.max()),
        clip_count=clips,
    )


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    try:
        spec = req.spec.to_spec()
        samples = np.array(req.samples, dtype=np.int64)
        datapath = MtsDatapath()
        result = datapath.simulate_2d(spec, samples, record_trace=req.include_trace)
        reference = inverse_2d(spec, samples)
    except ValueError as exc:
        raise _bad_request(exc) from None
    trace = None
    if req.include_trace:
        trace = [
            TraceRowModel(
                clk=row.clk,
                input_enable=row.input_enable,
                avc_vvc=row.avc_vvc,
                tr_type=row.tr_type,
                tr_size=row.tr_size,
                tr_dir=row.tr_dir,
                data_in=list(row.data_in),
                data_enable=row.data_enable,
                data_out_inter=list(row.data_out_inter),
                data_out_fin=list(row.data_out_fin),
            )
            for row in result.trace
        ]
    return SimulateResponse(
        samples=result.block.samples.tolist(),
        report=_report_model(result.report),
        passes=[
            _pass_model(VERTICAL, result.vertical),
            _pass_model(HORIZONTAL, result.horizontal),
        ],
        transpose_words=result.transpose_words,
        matches_reference=bool(np.array_equal(result.block.samples, reference.samples)),
        trace=trace,
    )


@app.post("/campaign", response_model=CampaignResponse)
def campaign(req: CampaignRequest) -> CampaignResponse:
    c = Campaign(
        seed=req.seed,
        vector_count=req.vector_count,
        include_coverage=req.include_coverage,
        coverage_blocks=req.coverage_blocks,
    )
    run_selfcheck(c, jobs=req.jobs)
    summary = c.summary()
    return CampaignResponse(**summary)


@app.get("/rom", response_model=RomResponse)
def rom() -> RomResponse:
    image = pack_rom()
    return RomResponse(
        column_count=image.column_count,
        total_bits=image.total_bits,
        target_columns=image.target_columns,
        target_bits=image.target_bits,
        delta_bits=image.delta_bits,
        delta_flagged=image.delta_flagged,
        map_text=image.map_text(),
        image_base64=base64.b64encode(image.to_binary()).decode("ascii"),
    )


@app.get("/matrices/{kind}/{n}", response_model=MatrixResponse)
def matrices(kind: str, n: int) -> MatrixResponse:
    try:
        matrix = integer_matrix(TransformKind.from_token(kind), n)
    except ValueError as exc:
        raise _bad_request(exc) from None
    return MatrixResponse(
        kind=matrix.kind.token,
        n=matrix.n,
        scale_log2=matrix.scale_log2,
        derived=matrix.derived,
        entries=matrix.entries.tolist(),
    )


@app.get("/cost/{arch}", response_model=CostResponse)
def cost(arch: str) -> CostResponse:
    try:
        report = architecture_cost(arch)
    except ValueError as exc:
        raise _bad_request(exc) from None
    return CostResponse(**report.as_dict())


@app.get("/fps", response_model=FpsResponse)
def fps(
    clock_hz: float = 600e6,
    width: int = 3840,
    height: int = 2160,
    chroma_factor: float = 1.5,
    passes: int = 2,
) -> FpsResponse:
    try:
        estimate = fps_estimate(clock_hz, width, height, chroma_factor, passes)
    except ValueError as exc:
        raise _bad_request(exc) from None
    base = fps_report(clock_hz)
    return FpsResponse(
        clock_hz=clock_hz,
        width=width,
        height=height,
        chroma_factor=chroma_factor,
        passes=passes,
        fps_estimate=estimate,
        fps_luma_single_pass=fps_estimate(clock_hz, width, height, 1.0, 1),
        reported_conservative_fps=base["reported_conservative_fps"],
        note=base["note"],
    )


@app.post("/golden/export", response_model=GoldenExportResponse)
def golden_export(req: GoldenExportRequest) -> GoldenExportResponse:
    try:
        out_dir = export_golden(req.spec.to_spec(), req.count, req.root, req.seed)
    except (ValueError, OSError) as exc:
        raise _bad_request(exc) from None
    return GoldenExportResponse(directory=str(out_dir), count=req.count)
