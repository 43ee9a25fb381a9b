"""Transform coefficient generation and ROM packing.

Real-valued DCT-II / DST-VII / DCT-VIII basis functions, the integer
matrices derived from them by fixed-point rounding, the permutation/sign
relation that turns the DST-VII kernel into a DCT-VIII, and the packed
coefficient ROM used by the datapath simulator.

Integerization rule: entry = round_half_away_from_zero(2**(6 + log2(n)/2)
* basis).  Every entry of every supported matrix fits in a signed byte,
which is what the 8-bit ROM packing below relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from functools import lru_cache

import numpy as np

DCT2_ORDERS = (4, 8, 16, 32, 64)
MTS_ORDERS = (4, 8, 16, 32)

ROM_COLUMN_BITS = 256
ROM_COEFFS_PER_COLUMN = 32
ROM_TARGET_COLUMNS = 68
ROM_TARGET_BITS = 17408


class TransformKind(IntEnum):
    """Transform type encoding used on the tr_type interface pins."""

    DCT2 = 0
    DCT8 = 1
    DST7 = 2

    @property
    def token(self) -> str:
        return self.name.lower()

    @classmethod
    def from_token(cls, token: str) -> "TransformKind":
        try:
            return cls[token.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown transform kind {token!r}") from None


def valid_orders(kind: TransformKind) -> tuple[int, ...]:
    return DCT2_ORDERS if kind == TransformKind.DCT2 else MTS_ORDERS


def require_valid(kind: TransformKind, n: int) -> None:
    if n not in valid_orders(kind):
        raise ValueError(f"order {n} is not valid for {kind.token}")


def scale_log2_for(n: int) -> float:
    return 6.0 + math.log2(n) / 2.0


def round_half_away_from_zero(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def basis_value(kind: TransformKind, n: int, i: int, j: int) -> float:
    """Real-valued basis sample for row (frequency) i at position j."""
    require_valid(kind, n)
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"indices ({i},{j}) out of range for order {n}")
    if kind == TransformKind.DCT2:
        w = math.sqrt(0.5) if i == 0 else 1.0
        return w * math.sqrt(2.0 / n) * math.cos(math.pi * i * (2 * j + 1) / (2 * n))
    if kind == TransformKind.DST7:
        return math.sqrt(4.0 / (2 * n + 1)) * math.sin(
            math.pi * (2 * i + 1) * (j + 1) / (2 * n + 1)
        )
    return math.sqrt(4.0 / (2 * n + 1)) * math.cos(
        math.pi * (2 * i + 1) * (2 * j + 1) / (4 * n + 2)
    )


@dataclass(frozen=True)
class CoeffMatrix:
    """An n x n integer transform matrix, rows indexed by frequency.

    ``derived`` records provenance: False for matrices produced directly by
    the rounding rule, True for a DCT-VIII obtained from the DST-VII kernel
    through the permutation/sign identity.
    """

    kind: TransformKind
    n: int
    entries: np.ndarray
    scale_log2: float
    derived: bool = False

    def __post_init__(self):
        if self.entries.shape != (self.n, self.n):
            raise ValueError("entry array shape does not match order")
        if np.any(self.entries > 127) or np.any(self.entries < -128):
            raise ValueError("matrix entry outside signed 8-bit range")
        self.entries.setflags(write=False)


@lru_cache(maxsize=None)
def integer_matrix(kind: TransformKind, n: int) -> CoeffMatrix:
    """Fixed-point integer matrix: round(2**(6 + log2(n)/2) * basis)."""
    require_valid(kind, n)
    scale = 2.0 ** scale_log2_for(n)
    rows = [
        [round_half_away_from_zero(scale * basis_value(kind, n, i, j)) for j in range(n)]
        for i in range(n)
    ]
    return CoeffMatrix(kind, n, np.array(rows, dtype=np.int32), scale_log2_for(n))


def lambda_matrix(n: int) -> np.ndarray:
    """Anti-diagonal permutation: lambda[i][j] = 1 iff j = n-1-i."""
    return np.eye(n, dtype=np.int32)[::-1].copy()


def gamma_matrix(n: int) -> np.ndarray:
    """Diagonal alternating signs: gamma[i][i] = (-1)**i."""
    return np.diag(np.array([(-1) ** i for i in range(n)], dtype=np.int32))


@dataclass(frozen=True)
class PermSignPair:
    """The permutation/sign pair relating the DCT-VIII to the DST-VII."""

    lambda_perm: np.ndarray
    gamma: np.ndarray

    @classmethod
    def for_order(cls, n: int) -> "PermSignPair":
        return cls(lambda_matrix(n), gamma_matrix(n))


def dct8_from_dst7(s7: CoeffMatrix) -> CoeffMatrix:
    """Derive the DCT-VIII matrix from the DST-VII kernel.

    The inverse-side identity is C8^T = Lambda @ S7^T @ Gamma; transposing
    back to row-by-frequency layout gives C8 = Gamma @ S7 @ Lambda.  Note
    the placement: signs act on the kernel's input index (frequency),
    order reversal on its output index.
    """
    if s7.kind != TransformKind.DST7:
        raise ValueError("dct8_from_dst7 requires a DST7 matrix")
    n = s7.n
    pair = PermSignPair.for_order(n)
    c8t = pair.lambda_perm @ s7.entries.T @ pair.gamma
    return CoeffMatrix(TransformKind.DCT8, n, np.ascontiguousarray(c8t.T), s7.scale_log2, derived=True)


# --- ROM packing -----------------------------------------------------------
#
# The simulator multiplies each incoming sample by one stored "line" of up
# to 32 signed bytes.  Stored submatrices:
#   dct2o  <k>: odd block of the 2k-point DCT-II butterfly stage: rows
#               1,3,...,2k-1 of the 2k-point matrix restricted to the first
#               k columns.  The order-32 odd block keeps only its first 16
#               lines: under zeroing the upper coefficients never arrive.
#   dct2b  4:   the order-4 butterfly base (the full 4-point matrix).
#   dst7   <n>: DST-VII kernel rows; the 32-point kernel stores only the 16
#               retained lines.
# Submatrices read twice per cycle at the full 2-sample input rate (the
# 4-point base and the 4/8/16-point DST-VII kernels) are stored twice.
# Every submatrix starts on a fresh 256-bit column; lines never straddle a
# column boundary because all line widths divide 32.

DCT2_ODD = "dct2o"
DCT2_BASE = "dct2b"
DST7_KERNEL = "dst7"
REPLICA_SUFFIX = "_rep"


def dct2_odd_block(k: int) -> np.ndarray:
    """Odd block of the 2k-point butterfly stage (stored lines only)."""
    if 2 * k not in DCT2_ORDERS:
        raise ValueError(f"no order-{k} odd block")
    parent = integer_matrix(TransformKind.DCT2, 2 * k).entries
    lines = parent[1::2, :k]
    if 2 * k == 64:
        lines = lines[:16]  # zeroing: coefficients 32..63 never feed the engine
    return np.ascontiguousarray(lines)


def dct2_base_block() -> np.ndarray:
    return integer_matrix(TransformKind.DCT2, 4).entries.copy()


def dst7_kernel_block(n: int) -> np.ndarray:
    if n not in MTS_ORDERS:
        raise ValueError(f"no order-{n} DST7 kernel")
    lines = integer_matrix(TransformKind.DST7, n).entries
    if n == 32:
        lines = lines[:16]  # zeroing: only 16 input lines are ever read
    return np.ascontiguousarray(lines)


def rom_input_set() -> list[tuple[str, int, np.ndarray]]:
    """Canonical ROM contents: DCT2 odd parts descending, base, then DST7
    kernels descending, with the dual-read submatrices replicated."""
    entries: list[tuple[str, int, np.ndarray]] = []
    for k in (32, 16, 8, 4):
        entries.append((DCT2_ODD, k, dct2_odd_block(k)))
    entries.append((DCT2_BASE, 4, dct2_base_block()))
    entries.append((DCT2_BASE + REPLICA_SUFFIX, 4, dct2_base_block()))
    for n in (32, 16, 8, 4):
        entries.append((DST7_KERNEL, n, dst7_kernel_block(n)))
        if n != 32:  # 32-point runs at one sample/cycle: single read suffices
            entries.append((DST7_KERNEL + REPLICA_SUFFIX, n, dst7_kernel_block(n)))
    return entries


@dataclass
class RomDirectoryEntry:
    kind: str
    n: int
    start_column: int
    column_count: int
    line_count: int
    line_width: int


@dataclass
class RomImage:
    """Packed coefficient ROM: 256-bit columns of 32 signed bytes each."""

    words: list[bytes]
    directory: dict[tuple[str, int], RomDirectoryEntry] = field(default_factory=dict)

    @property
    def column_count(self) -> int:
        return len(self.words)

    @property
    def total_bits(self) -> int:
        return self.column_count * ROM_COLUMN_BITS

    @property
    def target_columns(self) -> int:
        return ROM_TARGET_COLUMNS

    @property
    def target_bits(self) -> int:
        return ROM_TARGET_BITS

    @property
    def delta_bits(self) -> int:
        return self.total_bits - ROM_TARGET_BITS

    @property
    def delta_flagged(self) -> bool:
        """True when the canonical layout misses the target by more than
        one column's worth of bits."""
        return abs(self.delta_bits) > ROM_COLUMN_BITS

    def read_line(self, kind: str, n: int, line: int) -> np.ndarray:
        entry = self.directory[(kind, n)]
        if not 0 <= line < entry.line_count:
            raise ValueError(f"line {line} out of range for {kind}/{n}")
        offset = line * entry.line_width
        col = entry.start_column + offset // ROM_COEFFS_PER_COLUMN
        byte0 = offset % ROM_COEFFS_PER_COLUMN
        raw = self.words[col][byte0 : byte0 + entry.line_width]
        return np.frombuffer(raw, dtype=np.int8).astype(np.int64)

    def read_coefficient(self, kind: str, n: int, line: int, pos: int) -> int:
        return int(self.read_line(kind, n, line)[pos])

    def to_binary(self) -> bytes:
        """Raw image: little-endian 256-bit words, column 0 first.

        Coefficient k of a column is byte k, i.e. the least significant
        byte of the word holds coefficient 0.
        """
        return b"".join(self.words)

    def map_text(self) -> str:
        lines = []
        for (kind, n), entry in sorted(self.directory.items(), key=lambda kv: kv[1].start_column):
            for c in range(entry.column_count):
                col = entry.start_column + c
                lines.append(f"{kind} {n} {c} {col * ROM_COEFFS_PER_COLUMN}")
        return "\n".join(lines) + "\n"

    def with_corrupted_byte(self, column: int, byte_index: int, value: int) -> "RomImage":
        """Copy of the image with one raw byte replaced (fault injection)."""
        words = [bytearray(w) for w in self.words]
        words[column][byte_index] = value & 0xFF
        return RomImage([bytes(w) for w in words], dict(self.directory))


def pack_rom(entries: list[tuple[str, int, np.ndarray]] | None = None) -> RomImage:
    """Pack submatrices into 256-bit columns, 32 signed bytes per column."""
    if entries is None:
        entries = rom_input_set()
    words: list[bytes] = []
    directory: dict[tuple[str, int], RomDirectoryEntry] = {}
    for kind, n, lines in entries:
        lines = np.asarray(lines)
        if np.any(lines > 127) or np.any(lines < -128):
            raise ValueError(f"{kind}/{n}: coefficient outside signed 8-bit range")
        if (kind, n) in directory:
            raise ValueError(f"duplicate ROM entry {kind}/{n}")
        line_count, line_width = lines.shape
        flat = lines.astype(np.int8).tobytes()
        ncols = -(-len(flat) // ROM_COEFFS_PER_COLUMN)
        flat = flat.ljust(ncols * ROM_COEFFS_PER_COLUMN, b"\x00")
        start = len(words)
        for c in range(ncols):
            words.append(flat[c * ROM_COEFFS_PER_COLUMN : (c + 1) * ROM_COEFFS_PER_COLUMN])
        directory[(kind, n)] = RomDirectoryEntry(kind, n, start, ncols, line_count, line_width)
    return RomImage(words, directory)


def write_rom_files(rom: RomImage, binary_path, map_path) -> None:
    with open(binary_path, "wb") as f:
        f.write(rom.to_binary())
    with open(map_path, "w") as f:
        f.write(rom.map_text())
