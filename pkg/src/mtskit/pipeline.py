"""Cycle-level model of the 32-multiplier shared datapath.

Each data cycle carries two samples (or one, duplicated on both lanes,
for the zeroed large sizes), multiplies them by stored coefficient lines
fetched from the packed ROM, and accumulates into per-stage partial sums.
DCT-II inputs route to their butterfly leaf (an odd block or the order-4
base); the leaves are folded with free add/subtract pairs when the vector
completes.  Output streams at exactly 2 samples/cycle after a fixed
latency that is identical for every size and type, so back-to-back
vectors never stall.

The latency constant is the full 64-point block pass at 2 px/cycle plus
the pipeline depth; only its constancy is contractual.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .blocks import Block, TransformSpec
from .coeff import (
    DCT2_BASE,
    DCT2_ODD,
    DST7_KERNEL,
    RomImage,
    TransformKind,
    pack_rom,
)
from .transform import (
    STAGE1_SHIFT,
    _coeff_batch,
    _full_coeff_block,
    clip16,
    retained_count,
    stage2_shift,
)

TR_SIZE_CODE = {4: 0, 8: 1, 16: 2, 32: 3, 64: 4}
PIPE_DEPTH = 4
MAX_MULTIPLIERS = 32
ACC_BITS = 32

TRACE_COLUMNS = (
    "clk",
    "rst_n",
    "input_enable",
    "avc_vvc",
    "tr_type",
    "tr_size",
    "tr_dir",
    "data_in",
    "data_enable",
    "data_out_inter",
    "data_out_fin",
)

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
TR_DIR_CODE = {HORIZONTAL: 0, VERTICAL: 1}


def block_cycles(n: int) -> int:
    """Cycles for one full 1-D pass over an n x n block at 2 px/cycle."""
    if n not in TR_SIZE_CODE:
        raise ValueError(f"unsupported transform size {n}")
    return n * n // 2


def fixed_latency() -> int:
    """Size-independent cycles from input_enable to the first output."""
    return block_cycles(64) + PIPE_DEPTH


def input_rate(kind: TransformKind, n: int) -> int:
    """Samples per cycle on the input: 1 when zeroing halves the stream."""
    return 1 if retained_count(kind, n) < n else 2


@dataclass
class CycleReport:
    total_cycles: int
    latency_cycles: int
    throughput_px_per_cycle: Fraction
    input_rate_px_per_cycle: Fraction

    def __post_init__(self):
        if self.throughput_px_per_cycle != 2:
            raise AssertionError("output throughput contract broken")


@dataclass
class MacArrayState:
    """Snapshot of the shared multiplier array during one data cycle."""

    mult_products: list
    accumulators: dict
    sel: int
    coeff_column: list


@dataclass
class TraceRow:
    clk: int
    input_enable: int = 0
    avc_vvc: int = 1
    tr_type: int = 0
    tr_size: int = 0
    tr_dir: int = 0
    data_in: tuple[int, int] = (0, 0)
    data_enable: int = 0
    data_out_inter: tuple[int, int] = (0, 0)
    data_out_fin: tuple[int, int] = (0, 0)

    def csv_values(self) -> list[str]:
        def pair(p):
            return f"{p[0]};{p[1]}"

        return [
            str(self.clk),
            "1",
            str(self.input_enable),
            str(self.avc_vvc),
            str(self.tr_type),
            str(self.tr_size),
            str(self.tr_dir),
            pair(self.data_in),
            str(self.data_enable),
            pair(self.data_out_inter),
            pair(self.data_out_fin),
        ]


def trace_to_csv(rows: list[TraceRow]) -> str:
    out = [",".join(TRACE_COLUMNS)]
    out.extend(",".join(row.csv_values()) for row in rows)
    return "\n".join(out) + "\n"


@dataclass
class PassResult:
    outputs: list[np.ndarray]
    trace: list[TraceRow] | None
    report: CycleReport
    max_mults_per_cycle: int
    max_abs_accumulator: int
    mac_states: list[MacArrayState] | None = None


@dataclass
class Sim2dResult:
    block: Block
    report: CycleReport
    vertical: PassResult
    horizontal: PassResult
    transpose_words: int
    trace: list[TraceRow] | None


class TransposeMemory:
    """Dual-bank intermediate store between the two 1-D passes."""

    def __init__(self, size: int = 64):
        self.banks = [np.zeros((size, size), dtype=np.int32) for _ in range(2)]
        self.words_written = 0

    def write_column(self, bank: int, col: int, values: np.ndarray) -> None:
        self.banks[bank][: len(values), col] = values
        self.words_written += len(values)

    def read_row(self, bank: int, row: int, width: int) -> np.ndarray:
        return self.banks[bank][row, :width].copy()


def _dct2_leaf(n: int, index: int) -> tuple[str, int, int]:
    """Butterfly leaf for coefficient `index` of an n-point DCT-II: the
    (kind, n, line) of the stored submatrix the sample multiplies."""
    k, level = index, n
    while k % 2 == 0 and level > 4:
        k //= 2
        level //= 2
    if level == 4:
        return DCT2_BASE, 4, k
    return DCT2_ODD, level // 2, (k - 1) // 2


class MtsDatapath:
    """Functional cycle model behind the Table-style port interface.

    Coefficients come exclusively from the packed ROM image, so a
    corrupted ROM byte corrupts outputs; decoded lines are cached per
    instance.  Instances are single-threaded; use one per worker.
    """

    def __init__(self, rom: RomImage | None = None):
        self.rom = rom if rom is not None else pack_rom()
        self._lines: dict[tuple[str, int, int], np.ndarray] = {}

    def _line(self, kind: str, n: int, index: int) -> np.ndarray:
        key = (kind, n, index)
        cached = self._lines.get(key)
        if cached is None:
            cached = self.rom.read_line(kind, n, index)
            self._lines[key] = cached
        return cached

    def _mac_schedule(self, kind: TransformKind, n: int):
        """Per retained-input routing: (leaf kind, leaf n, line, sign)."""
        r = retained_count(kind, n)
        if kind == TransformKind.DCT2:
            return [(*_dct2_leaf(n, i), 1) for i in range(r)]
        sign = -1 if kind == TransformKind.DCT8 else 1
        return [(DST7_KERNEL, n, i, sign**i) for i in range(r)]

    def _fold(self, kind: TransformKind, n: int, partials: dict) -> np.ndarray:
        if kind == TransformKind.DCT2:
            vec = partials[(DCT2_BASE, 4)]
            level = 8
            while level <= n:
                odd = partials[(DCT2_ODD, level // 2)]
                nxt = np.empty(level, dtype=np.int64)
                nxt[: level // 2] = vec + odd
                nxt[level // 2 :] = (vec - odd)[::-1]
                vec = nxt
                level *= 2
            return vec
        vec = partials[(DST7_KERNEL, n)]
        return vec[::-1].copy() if kind == TransformKind.DCT8 else vec

    def run_pass(
        self,
        kind: TransformKind,
        n: int,
        direction: str,
        vectors,
        bit_depth: int = 8,
        *,
        avc_vvc: int = 1,
        record_trace: bool = False,
    ) -> PassResult:
        """Stream one or more coefficient vectors through the datapath.

        Vectors are admitted back to back, one per n/2-cycle slot; each
        sees the same fixed latency and its outputs stream at 2 px/cycle
        on the port selected by the direction.
        """
        if avc_vvc == 0:
            raise ValueError("AVC core transforms are out of scope")
        if direction not in TR_DIR_CODE:
            raise ValueError(f"direction must be {HORIZONTAL!r} or {VERTICAL!r}")
        shift = STAGE1_SHIFT if direction == VERTICAL else stage2_shift(bit_depth)
        rate = input_rate(kind, n)
        slot = n // 2
        schedule = self._mac_schedule(kind, n)
        latency = fixed_latency()

        outputs: list[np.ndarray] = []
        max_mults = 0
        max_acc = 0
        mac_cycles: list[MacArrayState] | None = [] if record_trace else None

        for vec in vectors:
            coeffs, _ = _coeff_batch(kind, n, np.asarray(vec))
            coeffs = coeffs[0]
            partials: dict[tuple[str, int], np.ndarray] = {}
            for leaf_kind, leaf_n, line, _sign in schedule:
                width = self._line(leaf_kind, leaf_n, line).shape[0]
                partials.setdefault((leaf_kind, leaf_n), np.zeros(width, dtype=np.int64))

            for c in range(slot):
                live = (2 * c, 2 * c + 1) if rate == 2 else (c,)
                mults = 0
                products: list[int] = []
                column: list[int] = []
                for i in live:
                    leaf_kind, leaf_n, line_no, sign = schedule[i]
                    line = self._line(leaf_kind, leaf_n, line_no)
                    sample = int(coeffs[i]) * sign
                    partials[(leaf_kind, leaf_n)] += sample * line
                    mults += line.shape[0]
                    if record_trace:
                        products.extend(int(sample) * int(v) for v in line)
                        column.extend(int(v) for v in line)
                if mults > MAX_MULTIPLIERS:
                    raise AssertionError("multiplier budget exceeded")
                max_mults = max(max_mults, mults)
                if record_trace:
                    products = (products + [0] * MAX_MULTIPLIERS)[:MAX_MULTIPLIERS]
                    mac_cycles.append(
                        MacArrayState(
                            mult_products=products,
                            accumulators={k: v.copy() for k, v in partials.items()},
                            sel=1 if rate == 2 else 0,
                            coeff_column=column,
                        )
                    )

            sums = self._fold(kind, n, partials)
            peak = int(np.max(np.abs(sums))) if sums.size else 0
            max_acc = max(max_acc, peak)
            if peak >= 1 << (ACC_BITS - 1):
                raise AssertionError("accumulator width exceeded")
            if shift > 0:
                sums = (sums + (1 << (shift - 1))) >> shift
            outputs.append(clip16(sums).astype(np.int32))

        total = len(outputs) * slot + latency
        report = CycleReport(
            total_cycles=total,
            latency_cycles=latency,
            throughput_px_per_cycle=Fraction(2),
            input_rate_px_per_cycle=Fraction(rate),
        )
        trace = None
        if record_trace:
            trace = self._build_trace(kind, n, direction, vectors, outputs, rate, slot, latency)
        return PassResult(outputs, trace, report, max_mults, max_acc, mac_cycles)

    def _build_trace(self, kind, n, direction, vectors, outputs, rate, slot, latency):
        tr_dir = TR_DIR_CODE[direction]
        total = len(outputs) * slot + latency
        rows = [
            TraceRow(clk=t, tr_type=int(kind), tr_size=TR_SIZE_CODE[n], tr_dir=tr_dir)
            for t in range(total)
        ]
        for v, vec in enumerate(vectors):
            coeffs, _ = _coeff_batch(kind, n, np.asarray(vec))
            coeffs = coeffs[0]
            base = v * slot
            rows[base].input_enable = 1
            for c in range(slot):
                t = base + 1 + c
                if rate == 2:
                    pair = (int(coeffs[2 * c]), int(coeffs[2 * c + 1]))
                else:
                    pair = (int(coeffs[c]), int(coeffs[c]))  # sel disabled: lanes match
                rows[t].data_in = pair
            out = outputs[v]
            first = base + latency
            rows[first].data_enable = 1
            for c in range(slot):
                pair = (int(out[2 * c]), int(out[2 * c + 1]))
                if tr_dir == TR_DIR_CODE[VERTICAL]:
                    rows[first + c].data_out_inter = pair
                else:
                    rows[first + c].data_out_fin = pair
        return rows

    def simulate_block(
        self,
        spec: TransformSpec,
        direction: str,
        coeff_stream,
        *,
        avc_vvc: int = 1,
        record_trace: bool = True,
    ) -> PassResult:
        """Run a single 1-D vector for the given direction of the spec."""
        if direction == VERTICAL:
            kind, n = spec.kind_v, spec.size_v
        elif direction == HORIZONTAL:
            kind, n = spec.kind_h, spec.size_h
        else:
            raise ValueError(f"direction must be {HORIZONTAL!r} or {VERTICAL!r}")
        return self.run_pass(
            kind,
            n,
            direction,
            [coeff_stream],
            spec.bit_depth,
            avc_vvc=avc_vvc,
            record_trace=record_trace,
        )

    def simulate_2d(
        self,
        spec: TransformSpec,
        coeffs,
        *,
        record_trace: bool = False,
    ) -> Sim2dResult:
        """Folded 2-D run: vertical pass, transpose memory, horizontal pass."""
        full = _full_coeff_block(spec, coeffs)
        rv = retained_count(spec.kind_v, spec.size_v)
        rh = retained_count(spec.kind_h, spec.size_h)

        columns = [full[:rv, c] for c in range(spec.size_h)]
        vpass = self.run_pass(
            spec.kind_v, spec.size_v, VERTICAL, columns, spec.bit_depth, record_trace=record_trace
        )
        tmem = TransposeMemory(max(spec.size_v, spec.size_h))
        for c, col in enumerate(vpass.outputs):
            tmem.write_column(0, c, col)

        rows_in = [tmem.read_row(0, r, spec.size_h)[:rh] for r in range(spec.size_v)]
        hpass = self.run_pass(
            spec.kind_h, spec.size_h, HORIZONTAL, rows_in, spec.bit_depth, record_trace=record_trace
        )
        block = Block(np.stack(hpass.outputs).astype(np.int32))

        fed = len(columns) * rv + len(rows_in) * rh
        fed_cycles = len(columns) * (spec.size_v // 2) + len(rows_in) * (spec.size_h // 2)
        report = CycleReport(
            total_cycles=vpass.report.total_cycles + hpass.report.total_cycles,
            latency_cycles=fixed_latency(),
            throughput_px_per_cycle=Fraction(2),
            input_rate_px_per_cycle=Fraction(fed, fed_cycles),
        )
        trace = None
        if record_trace:
            offset = vpass.report.total_cycles
            trace = list(vpass.trace)
            trace.extend(replace(row, clk=row.clk + offset) for row in hpass.trace)
        return Sim2dResult(block, report, vpass, hpass, tmem.words_written, trace)
