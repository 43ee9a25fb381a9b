"""Verification campaigns: seeded pseudo-random self-checks of the cycle
simulator against the reference transforms, plus golden-vector management.

The generator is splitmix64, chosen because it is tiny, documented, and
bit-stable across platforms: value(seed, k) mixes seed + (k+1) * PHI.
Per-shard and per-vector seeds derive from it, so campaigns are exactly
reproducible and shard cleanly across worker threads.  A campaign's 1-D
budget is spread evenly over the stage configurations derived from its
specs (the published methodology quotes a total vector count); a small
2-D sweep additionally covers every legal spec combination end to end.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .blocks import Block, BlockFile, TransformSpec, read_block, write_block_text
from .coeff import DCT2_ORDERS, MTS_ORDERS, RomImage, TransformKind
from .pipeline import HORIZONTAL, VERTICAL, MtsDatapath
from .transform import STAGE1_SHIFT, inverse_1d_matrix, inverse_2d, retained_count, stage2_shift

_PHI = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def splitmix64(state: int) -> int:
    z = (state + _PHI) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derived_seed(seed: int, index: int) -> int:
    return splitmix64((seed + index * _PHI) & _MASK)


def random_int16(seed: int, count: int) -> np.ndarray:
    """`count` uniform signed 16-bit samples, vectorized splitmix64."""
    with np.errstate(over="ignore"):
        z = (np.uint64(seed & _MASK) + (np.arange(1, count + 1, dtype=np.uint64)) * np.uint64(_PHI))
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return (z & np.uint64(0xFFFF)).astype(np.uint16).view(np.int16).astype(np.int64)


def legal_2d_specs(bit_depth: int = 8) -> list[TransformSpec]:
    """Every legal (kind_h, kind_v, size_h, size_v) combination."""
    specs = []
    for sh in DCT2_ORDERS:
        for sv in DCT2_ORDERS:
            specs.append(TransformSpec(TransformKind.DCT2, TransformKind.DCT2, sh, sv, bit_depth))
    mts = (TransformKind.DST7, TransformKind.DCT8)
    for kh in mts:
        for kv in mts:
            for sh in MTS_ORDERS:
                for sv in MTS_ORDERS:
                    specs.append(TransformSpec(kh, kv, sh, sv, bit_depth))
    return specs


@dataclass(frozen=True)
class StageConfig:
    """One 1-D configuration of the datapath: kind, order, direction."""

    kind: TransformKind
    n: int
    direction: str
    bit_depth: int = 8

    @property
    def label(self) -> str:
        return f"{self.kind.token}-{self.n}-{self.direction}"


def stage_configs(specs: list[TransformSpec]) -> list[StageConfig]:
    """Distinct 1-D stage configurations exercised by the given specs."""
    seen: dict[StageConfig, None] = {}
    for spec in specs:
        seen.setdefault(StageConfig(spec.kind_v, spec.size_v, VERTICAL, spec.bit_depth))
        seen.setdefault(StageConfig(spec.kind_h, spec.size_h, HORIZONTAL, spec.bit_depth))
    return list(seen)


@dataclass
class CampaignFailure:
    config: str
    index: int
    expected: list[int]
    actual: list[int]

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "index": self.index,
            "expected": self.expected,
            "actual": self.actual,
        }


@dataclass
class ShardResult:
    config: str
    vectors: int
    failures: int


@dataclass
class Campaign:
    """A reproducible self-check run: same seed + specs, same vectors."""

    seed: int = 1
    vector_count: int = 100000
    specs: list[TransformSpec] = field(default_factory=legal_2d_specs)
    include_coverage: bool = True
    coverage_blocks: int = 2
    failure_log: list[CampaignFailure] = field(default_factory=list)
    shard_results: list[ShardResult] = field(default_factory=list)
    coverage_results: list[ShardResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failure_log

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "vector_count": self.vector_count,
            "passed": self.passed,
            "total_failures": len(self.failure_log),
            "shards": [
                {"config": s.config, "vectors": s.vectors, "failures": s.failures}
                for s in self.shard_results
            ],
            "coverage": [
                {"config": s.config, "blocks": s.vectors, "failures": s.failures}
                for s in self.coverage_results
            ],
            "failures": [f.as_dict() for f in self.failure_log[:32]],
        }


def _shard_budgets(total: int, shards: int) -> list[int]:
    base, extra = divmod(total, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def _run_shard(
    shard_index: int,
    config: StageConfig,
    count: int,
    seed: int,
    rom: RomImage | None,
) -> tuple[ShardResult, list[CampaignFailure]]:
    datapath = MtsDatapath(rom)
    shift = STAGE1_SHIFT if config.direction == VERTICAL else stage2_shift(config.bit_depth)
    r = retained_count(config.kind, config.n)
    shard_seed = derived_seed(seed, shard_index + 1)
    failures: list[CampaignFailure] = []
    for v in range(count):
        vec = random_int16(derived_seed(shard_seed, v + 1), r)
        got = datapath.run_pass(
            config.kind, config.n, config.direction, [vec], config.bit_depth,
            record_trace=False,
        ).outputs[0]
        want = inverse_1d_matrix(config.kind, config.n, vec, shift)
        if not np.array_equal(got, want):
            failures.append(
                CampaignFailure(config.label, v, [int(x) for x in want], [int(x) for x in got])
            )
    return ShardResult(config.label, count, len(failures)), failures


def run_selfcheck(
    campaign: Campaign,
    *,
    rom: RomImage | None = None,
    jobs: int | None = None,
) -> Campaign:
    """Run the campaign: sharded 1-D self-check, then the 2-D sweep.

    Mismatches are recorded in the failure log, never raised; results
    merge in deterministic spec order regardless of worker scheduling.
    """
    campaign.failure_log = []
    campaign.shard_results = []
    campaign.coverage_results = []

    configs = stage_configs(campaign.specs)
    if configs and campaign.vector_count > 0:
        budgets = _shard_budgets(campaign.vector_count, len(configs))
        workers = jobs or min(len(configs), os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_shard, i, cfg, budgets[i], campaign.seed, rom)
                for i, cfg in enumerate(configs)
            ]
            for future in futures:  # submission order == spec order
                result, failures = future.result()
                campaign.shard_results.append(result)
                campaign.failure_log.extend(failures)

    if campaign.include_coverage and campaign.coverage_blocks > 0:
        datapath = MtsDatapath(rom)
        for s, spec in enumerate(campaign.specs):
            label = (
                f"{spec.kind_v.token}{spec.size_v}x{spec.kind_h.token}{spec.size_h}-2d"
            )
            fails = 0
            for b in range(campaign.coverage_blocks):
                rv = retained_count(spec.kind_v, spec.size_v)
                rh = retained_count(spec.kind_h, spec.size_h)
                seed = derived_seed(campaign.seed, (s + 1) * 65536 + b)
                coeffs = random_int16(seed, rv * rh).reshape(rv, rh)
                got = datapath.simulate_2d(spec, coeffs).block
                want = inverse_2d(spec, coeffs)
                if not np.array_equal(got.samples, want.samples):
                    fails += 1
                    campaign.failure_log.append(
                        CampaignFailure(
                            label, b,
                            [int(x) for x in want.samples.ravel()[:16]],
                            [int(x) for x in got.samples.ravel()[:16]],
                        )
                    )
            campaign.coverage_results.append(ShardResult(label, campaign.coverage_blocks, fails))
    return campaign


# --- golden vectors ---------------------------------------------------------


def _spec_dirname(spec: TransformSpec) -> tuple[str, str]:
    return f"{spec.kind_v.token}_{spec.kind_h.token}", f"{spec.size_h}x{spec.size_v}"


def export_golden(spec: TransformSpec, count: int, root, seed: int = 1) -> Path:
    """Write `count` input/output block pairs plus a manifest.

    Layout: <root>/golden/<kindv_kindh>/<WxH>/vec<i>.{in,out}; inputs are
    full coefficient blocks (zeroed region included), outputs the inverse
    transform residuals.  A zero count writes the manifest alone.
    """
    kind_dir, size_dir = _spec_dirname(spec)
    out_dir = Path(root) / "golden" / kind_dir / size_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    rv = retained_count(spec.kind_v, spec.size_v)
    rh = retained_count(spec.kind_h, spec.size_h)
    entries = []
    for i in range(count):
        coeffs = random_int16(derived_seed(seed, i + 1), rv * rh).reshape(rv, rh)
        full = np.zeros((spec.size_v, spec.size_h), dtype=np.int64)
        full[:rv, :rh] = coeffs
        residual = inverse_2d(spec, full)
        in_path = out_dir / f"vec{i}.in"
        out_path = out_dir / f"vec{i}.out"
        write_block_text(in_path, BlockFile(Block(full.astype(np.int32)), spec.kind_h,
                                            spec.kind_v, spec.bit_depth))
        write_block_text(out_path, BlockFile(residual, spec.kind_h, spec.kind_v,
                                             spec.bit_depth))
        entries.append({"index": i, "in": in_path.name, "out": out_path.name})
    manifest = {
        "seed": seed,
        "count": count,
        "spec": {
            "kind_h": spec.kind_h.token,
            "kind_v": spec.kind_v.token,
            "size_h": spec.size_h,
            "size_v": spec.size_v,
            "bit_depth": spec.bit_depth,
        },
        "entries": entries,
    }
    with open(out_dir / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return out_dir


def verify_golden(directory) -> list[str]:
    """Re-run the inverse over exported goldens; returns mismatch names."""
    directory = Path(directory)
    with open(directory / "manifest.json") as f:
        manifest = json.load(f)
    s = manifest["spec"]
    spec = TransformSpec(
        TransformKind.from_token(s["kind_h"]),
        TransformKind.from_token(s["kind_v"]),
        s["size_h"],
        s["size_v"],
        s["bit_depth"],
    )
    mismatches = []
    for entry in manifest["entries"]:
        coeffs = read_block(directory / entry["in"]).block
        expected = read_block(directory / entry["out"]).block
        actual = inverse_2d(spec, coeffs.samples)
        if not np.array_equal(actual.samples, expected.samples):
            mismatches.append(entry["in"])
    return mismatches
