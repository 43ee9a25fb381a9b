"""Pydantic request/response models for the transform service."""

from __future__ import annotations

from pydantic import BaseModel, Field, field_validator

from ..blocks import TransformSpec
from ..coeff import TransformKind

KIND_TOKENS = ("dct2", "dct8", "dst7")


class SpecModel(BaseModel):
    kind_h: str = "dct2"
    kind_v: str = "dct2"
    size_h: int = 8
    size_v: int = 8
    bit_depth: int = 8

    @field_validator("kind_h", "kind_v")
    @classmethod
    def _kind_token(cls, v: str) -> str:
        if v.lower() not in KIND_TOKENS:
            raise ValueError(f"kind must be one of {KIND_TOKENS}")
        return v.lower()

    def to_spec(self) -> TransformSpec:
        return TransformSpec(
            TransformKind.from_token(self.kind_h),
            TransformKind.from_token(self.kind_v),
            self.size_h,
            self.size_v,
            self.bit_depth,
        )

    @classmethod
    def from_spec(cls, spec: TransformSpec) -> "SpecModel":
        return cls(
            kind_h=spec.kind_h.token,
            kind_v=spec.kind_v.token,
            size_h=spec.size_h,
            size_v=spec.size_v,
            bit_depth=spec.bit_depth,
        )


class TransformRequest(BaseModel):
    spec: SpecModel
    samples: list[list[int]]
    forward: bool = False


class TransformResponse(BaseModel):
    samples: list[list[int]]
    width: int
    height: int
    min_value: int
    max_value: int
    clip_count: int


class CycleReportModel(BaseModel):
    total_cycles: int
    latency_cycles: int
    throughput_px_per_cycle: float
    input_rate_px_per_cycle: float


class PassModel(BaseModel):
    direction: str
    vector_count: int
    pass_cycles: int
    report: CycleReportModel
    max_mults_per_cycle: int


class TraceRowModel(BaseModel):
    clk: int
    rst_n: int = 1
    input_enable: int
    avc_vvc: int
    tr_type: int
    tr_size: int
    tr_dir: int
    data_in: list[int]
    data_enable: int
    data_out_inter: list[int]
    data_out_fin: list[int]


class SimulateRequest(BaseModel):
    spec: SpecModel
    samples: list[list[int]]
    include_trace: bool = False


class SimulateResponse(BaseModel):
    samples: list[list[int]]
    report: CycleReportModel
    passes: list[PassModel]
    transpose_words: int
    matches_reference: bool
    trace: list[TraceRowModel] | None = None


class CampaignRequest(BaseModel):
    seed: int = 1
    vector_count: int = Field(default=100000, ge=0)
    include_coverage: bool = True
    coverage_blocks: int = Field(default=2, ge=0)
    jobs: int | None = None


class ShardModel(BaseModel):
    config: str
    vectors: int
    failures: int


class CoverageModel(BaseModel):
    config: str
    blocks: int
    failures: int


class FailureModel(BaseModel):
    config: str
    index: int
    expected: list[int]
    actual: list[int]


class CampaignResponse(BaseModel):
    seed: int
    vector_count: int
    passed: bool
    total_failures: int
    shards: list[ShardModel]
    coverage: list[CoverageModel]
    failures: list[FailureModel]


class RomResponse(BaseModel):
    column_count: int
    total_bits: int
    target_columns: int
    target_bits: int
    delta_bits: int
    delta_flagged: bool
    map_text: str
    image_base64: str


class MatrixResponse(BaseModel):
    kind: str
    n: int
    scale_log2: float
    derived: bool
    entries: list[list[int]]


class CostResponse(BaseModel):
    architecture: str
    adders: int
    multipliers: int
    rom_bits: int
    notes: str


class FpsResponse(BaseModel):
    clock_hz: float
    width: int
    height: int
    chroma_factor: float
    passes: int
    fps_estimate: float
    fps_luma_single_pass: float
    reported_conservative_fps: int
    note: str


class GoldenExportRequest(BaseModel):
    spec: SpecModel
    count: int = Field(default=10, ge=0)
    seed: int = 1
    root: str


class GoldenExportResponse(BaseModel):
    directory: str
    count: int


class HealthResponse(BaseModel):
    status: str
    version: str
