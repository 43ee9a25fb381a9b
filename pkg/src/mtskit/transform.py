"""Bit-exact 1-D and 2-D inverse transforms, plus the test-support forward.

Three equivalent 1-D inverse routes exist on purpose: the plain matrix
product is the reference, the recursive even/odd butterfly covers DCT-II,
and the shared DST-VII kernel with sign/reversal stages covers DCT-VIII.
All integer arithmetic is exact (int64), so the routes agree bit for bit;
rounding and the 16-bit clamp are applied once per stage.

Inverse 2-D stage shifts follow the interoperable fixed-point schedule:
7 after the vertical stage, 20 - bit_depth after the horizontal stage.
The forward shifts (log2(width)+bit_depth-9, then log2(height)+6) exist
only to enable round-trip testing and are not normative.
"""

from __future__ import annotations

import numpy as np

from .blocks import Block, TransformSpec
from .coeff import TransformKind, integer_matrix, require_valid

INT16_MIN = -(1 << 15)
INT16_MAX = (1 << 15) - 1
STAGE1_SHIFT = 7


def stage2_shift(bit_depth: int) -> int:
    return 20 - bit_depth


def retained_count(kind: TransformKind, n: int) -> int:
    """Inputs kept after high-frequency zeroing: 32 of 64 for DCT-II,
    16 of 32 for DST-VII/DCT-VIII, everything otherwise."""
    require_valid(kind, n)
    if kind == TransformKind.DCT2 and n == 64:
        return 32
    if kind != TransformKind.DCT2 and n == 32:
        return 16
    return n


def clip16(values: np.ndarray) -> np.ndarray:
    return np.clip(values, INT16_MIN, INT16_MAX)


def _round_shift(sums: np.ndarray, shift: int) -> np.ndarray:
    if shift < 0:
        raise ValueError("shift must be non-negative")
    if shift == 0:
        return sums
    return (sums + (1 << (shift - 1))) >> shift


def _coeff_batch(kind: TransformKind, n: int, coeffs) -> tuple[np.ndarray, bool]:
    """Validate and normalize input to shape (batch, retained).

    Accepts the retained-length vector or the full-length vector whose
    zeroed tail must actually be zero; anything else is rejected.
    """
    r = retained_count(kind, n)
    arr = np.asarray(coeffs, dtype=np.int64)
    single = arr.ndim == 1
    if single:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError("coefficient input must be a vector or a batch of vectors")
    if arr.shape[1] == n and r != n:
        if np.any(arr[:, r:] != 0):
            raise ValueError(f"nonzero coefficients in the zeroed tail of a {n}-point input")
        arr = arr[:, :r]
    elif arr.shape[1] != r:
        raise ValueError(f"expected {r} retained coefficients for order {n}, got {arr.shape[1]}")
    return arr, single


def _finish(sums: np.ndarray, shift: int, single: bool) -> np.ndarray:
    out = clip16(_round_shift(sums, shift))
    return out[0] if single else out


def inverse_1d_matrix(kind: TransformKind, n: int, coeffs, shift: int) -> np.ndarray:
    """Reference inverse: out = clip16(round(M^T c >> shift)), summing over
    retained rows only.  Accepts a vector or a (batch, retained) array."""
    arr, single = _coeff_batch(kind, n, coeffs)
    m = integer_matrix(kind, n).entries.astype(np.int64)
    sums = arr @ m[: arr.shape[1], :]
    return _finish(sums, shift, single)


def _idct2_exact(arr: np.ndarray, n: int) -> np.ndarray:
    """Exact unshifted inverse DCT-II sums via recursive even/odd split."""
    if n == 4:
        return arr @ integer_matrix(TransformKind.DCT2, 4).entries.astype(np.int64)
    half = n // 2
    even = _idct2_exact(np.ascontiguousarray(arr[:, 0::2]), half)
    odd_rows = integer_matrix(TransformKind.DCT2, n).entries[1::2, :half].astype(np.int64)
    odd = arr[:, 1::2] @ odd_rows
    out = np.empty((arr.shape[0], n), dtype=np.int64)
    out[:, :half] = even + odd
    out[:, n - 1 : half - 1 : -1] = even - odd
    return out


def inverse_dct2_butterfly(n: int, coeffs, shift: int) -> np.ndarray:
    """Inverse DCT-II through the even/odd butterfly; bit-exact equal to
    the matrix route (rounding and clamping happen once, at the top)."""
    arr, single = _coeff_batch(TransformKind.DCT2, n, coeffs)
    full = np.zeros((arr.shape[0], n), dtype=np.int64)
    full[:, : arr.shape[1]] = arr
    sums = _idct2_exact(full, n)
    return _finish(sums, shift, single)


def inverse_mts_shared(kind: TransformKind, n: int, coeffs, shift: int) -> np.ndarray:
    """Inverse DST-VII/DCT-VIII through the shared DST-VII kernel.

    The DCT-VIII route alternates the signs of the input coefficients,
    runs the kernel, then reverses the output order.
    """
    if kind not in (TransformKind.DST7, TransformKind.DCT8):
        raise ValueError("shared kernel handles DST7 and DCT8 only")
    arr, single = _coeff_batch(kind, n, coeffs)
    r = arr.shape[1]
    kernel = integer_matrix(TransformKind.DST7, n).entries[:r, :].astype(np.int64)
    if kind == TransformKind.DCT8:
        signs = np.where(np.arange(r) % 2 == 0, 1, -1).astype(np.int64)
        sums = (arr * signs) @ kernel
        sums = sums[:, ::-1]
    else:
        sums = arr @ kernel
    return _finish(sums, shift, single)


def _full_coeff_block(spec: TransformSpec, coeffs) -> np.ndarray:
    """Normalize 2-D input to the full (size_v, size_h) array, validating
    that the zeroed region carries nothing."""
    arr = coeffs.samples if isinstance(coeffs, Block) else np.asarray(coeffs)
    arr = arr.astype(np.int64)
    rv = retained_count(spec.kind_v, spec.size_v)
    rh = retained_count(spec.kind_h, spec.size_h)
    if arr.shape == (rv, rh):
        full = np.zeros((spec.size_v, spec.size_h), dtype=np.int64)
        full[:rv, :rh] = arr
        return full
    if arr.shape == (spec.size_v, spec.size_h):
        if np.any(arr[rv:, :] != 0) or np.any(arr[:, rh:] != 0):
            raise ValueError("nonzero coefficients in the zeroed region")
        return arr
    raise ValueError(
        f"coefficient block must be {rv}x{rh} (retained) or "
        f"{spec.size_v}x{spec.size_h} (full), got {arr.shape[0]}x{arr.shape[1]}"
    )


def inverse_2d(spec: TransformSpec, coeffs, *, return_stats: bool = False):
    """Two separable inverse stages with an intermediate transpose.

    Vertical columns first (shift 7, clamped to 16 bits), then horizontal
    rows (shift 20 - bit_depth).  Returns the residual Block, plus a clip
    counter when requested.
    """
    full = _full_coeff_block(spec, coeffs)
    rv = retained_count(spec.kind_v, spec.size_v)
    rh = retained_count(spec.kind_h, spec.size_h)
    clips = 0

    cols = full[:rv, :].T  # (width, retained_v): one vector per column
    sums = cols @ integer_matrix(spec.kind_v, spec.size_v).entries[:rv, :].astype(np.int64)
    inter = _round_shift(sums, STAGE1_SHIFT)
    clips += int(np.count_nonzero((inter > INT16_MAX) | (inter < INT16_MIN)))
    inter = clip16(inter).T  # back to (size_v, size_h)

    rows = inter[:, :rh]  # zeroed columns produced exact zeros upstream
    sums = rows @ integer_matrix(spec.kind_h, spec.size_h).entries[:rh, :].astype(np.int64)
    out = _round_shift(sums, stage2_shift(spec.bit_depth))
    clips += int(np.count_nonzero((out > INT16_MAX) | (out < INT16_MIN)))
    block = Block(clip16(out).astype(np.int32))
    return (block, clips) if return_stats else block


def forward_2d(spec: TransformSpec, residual: Block | np.ndarray) -> Block:
    """Test-support forward transform; output zeroed beyond the region the
    inverse retains, so forward->inverse round trips are well formed."""
    arr = residual.samples if isinstance(residual, Block) else np.asarray(residual)
    arr = arr.astype(np.int64)
    if arr.shape != (spec.size_v, spec.size_h):
        raise ValueError(
            f"residual must be {spec.size_v}x{spec.size_h}, got {arr.shape[0]}x{arr.shape[1]}"
        )
    mh = integer_matrix(spec.kind_h, spec.size_h).entries.astype(np.int64)
    mv = integer_matrix(spec.kind_v, spec.size_v).entries.astype(np.int64)

    shift1 = int(np.log2(spec.size_h)) + spec.bit_depth - 9
    inter = clip16(_round_shift(arr @ mh.T, shift1))
    shift2 = int(np.log2(spec.size_v)) + 6
    coeffs = clip16(_round_shift(mv @ inter, shift2))

    rv = retained_count(spec.kind_v, spec.size_v)
    rh = retained_count(spec.kind_h, spec.size_h)
    coeffs[rv:, :] = 0
    coeffs[:, rh:] = 0
    return Block(coeffs.astype(np.int32))
