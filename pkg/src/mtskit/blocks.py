"""Sample blocks, 2-D transform specs, and the shared block file format.

A block file is either text -- header line ``W H BITDEPTH KIND_H KIND_V``
followed by one row of integers per line -- or binary: magic ``MTSB``,
width/height as little-endian uint16, bit depth and the two kind codes as
single bytes, a zero pad byte, then row-major int16 little-endian samples.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .coeff import TransformKind, valid_orders

BINARY_MAGIC = b"MTSB"
BIT_DEPTHS = (8, 10)


@dataclass
class Block:
    """Rectangular array of signed fixed-point samples."""

    samples: np.ndarray
    bit_width: int = 16

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.int32)
        if self.samples.ndim != 2:
            raise ValueError("block samples must be a 2-D array")
        lo, hi = -(1 << (self.bit_width - 1)), (1 << (self.bit_width - 1)) - 1
        if np.any(self.samples < lo) or np.any(self.samples > hi):
            raise ValueError(f"sample outside signed {self.bit_width}-bit range")

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @classmethod
    def zeros(cls, height: int, width: int, bit_width: int = 16) -> "Block":
        return cls(np.zeros((height, width), dtype=np.int32), bit_width)


@dataclass(frozen=True)
class TransformSpec:
    """Horizontal/vertical transform selection for one block.

    DCT-II never mixes with the other kinds, the 64-point order exists
    only for DCT-II, and DST-VII/DCT-VIII stop at order 32.
    """

    kind_h: TransformKind
    kind_v: TransformKind
    size_h: int
    size_v: int
    bit_depth: int = 8

    def __post_init__(self):
        if (self.kind_h == TransformKind.DCT2) != (self.kind_v == TransformKind.DCT2):
            raise ValueError("DCT2 applies to both directions or neither")
        for kind, size, axis in (
            (self.kind_h, self.size_h, "horizontal"),
            (self.kind_v, self.size_v, "vertical"),
        ):
            if size not in valid_orders(kind):
                raise ValueError(f"{axis} order {size} is not valid for {kind.token}")
        if self.bit_depth not in BIT_DEPTHS:
            raise ValueError(f"bit depth must be one of {BIT_DEPTHS}")

    @classmethod
    def square(cls, kind: TransformKind, n: int, bit_depth: int = 8) -> "TransformSpec":
        return cls(kind, kind, n, n, bit_depth)


@dataclass
class BlockFile:
    """A block together with the transform header stored in its file."""

    block: Block
    kind_h: TransformKind
    kind_v: TransformKind
    bit_depth: int = 8

    def spec(self) -> TransformSpec:
        return TransformSpec(
            self.kind_h, self.kind_v, self.block.width, self.block.height, self.bit_depth
        )


def write_block_text(path, bf: BlockFile) -> None:
    b = bf.block
    with open(path, "w") as f:
        f.write(f"{b.width} {b.height} {bf.bit_depth} {bf.kind_h.token} {bf.kind_v.token}\n")
        for row in b.samples:
            f.write(" ".join(str(int(v)) for v in row) + "\n")


def write_block_binary(path, bf: BlockFile) -> None:
    b = bf.block
    header = BINARY_MAGIC + struct.pack(
        "<HHBBBB", b.width, b.height, bf.bit_depth, int(bf.kind_h), int(bf.kind_v), 0
    )
    with open(path, "wb") as f:
        f.write(header)
        f.write(b.samples.astype("<i2").tobytes())


def read_block(path) -> BlockFile:
    """Read a block file, sniffing the binary magic."""
    with open(path, "rb") as f:
        head = f.read(4)
    if head == BINARY_MAGIC:
        return _read_binary(path)
    return _read_text(path)


def _read_binary(path) -> BlockFile:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 12:
        raise ValueError(f"{path}: truncated binary block file")
    w, h, depth, kh, kv, _pad = struct.unpack("<HHBBBB", data[4:12])
    body = data[12:]
    if len(body) != 2 * w * h:
        raise ValueError(f"{path}: expected {2 * w * h} sample bytes, found {len(body)}")
    samples = np.frombuffer(body, dtype="<i2").astype(np.int32).reshape(h, w)
    return BlockFile(Block(samples), TransformKind(kh), TransformKind(kv), depth)


def _read_text(path) -> BlockFile:
    with open(path, "r") as f:
        lines = f.read().splitlines()
    if not lines:
        raise ValueError(f"{path}:1: empty block file")
    parts = lines[0].split()
    if len(parts) != 5:
        raise ValueError(f"{path}:1: header must be 'W H BITDEPTH KIND_H KIND_V'")
    try:
        w, h, depth = int(parts[0]), int(parts[1]), int(parts[2])
        kh, kv = TransformKind.from_token(parts[3]), TransformKind.from_token(parts[4])
    except ValueError as exc:
        raise ValueError(f"{path}:1: {exc}") from None
    rows = []
    for idx, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            row = [int(tok) for tok in line.split()]
        except ValueError:
            raise ValueError(f"{path}:{idx}: non-integer sample") from None
        if len(row) != w:
            raise ValueError(f"{path}:{idx}: expected {w} samples, found {len(row)}")
        rows.append(row)
    if len(rows) != h:
        raise ValueError(f"{path}: expected {h} rows, found {len(rows)}")
    return BlockFile(Block(np.array(rows, dtype=np.int32)), kh, kv, depth)
