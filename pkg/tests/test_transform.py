"""1-D and 2-D transform behavior: reference path, butterfly and shared
kernel equivalence, zeroing enforcement, shifts and clipping, round trips,
and the block file format."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtskit.blocks import (
    Block,
    BlockFile,
    TransformSpec,
    read_block,
    write_block_binary,
    write_block_text,
)
from mtskit.coeff import DCT2_ORDERS, MTS_ORDERS, TransformKind, integer_matrix
from mtskit.transform import (
    clip16,
    forward_2d,
    inverse_1d_matrix,
    inverse_2d,
    inverse_dct2_butterfly,
    inverse_mts_shared,
    retained_count,
)

RNG = np.random.default_rng(987654321)


def whole_matrix_2d_oracle(spec: TransformSpec, coeffs: np.ndarray) -> np.ndarray:
    """Independent 2-D evaluation: plain matmuls with the documented
    shift/clip schedule, no separable-stage helper code."""
    mv = integer_matrix(spec.kind_v, spec.size_v).entries.astype(np.int64)
    mh = integer_matrix(spec.kind_h, spec.size_h).entries.astype(np.int64)
    inter = (mv.T @ coeffs.astype(np.int64) + 64) >> 7
    inter = np.clip(inter, -32768, 32767)
    shift2 = 20 - spec.bit_depth
    out = (inter @ mh + (1 << (shift2 - 1))) >> shift2
    return np.clip(out, -32768, 32767)


def test_retained_count_values():
    assert retained_count(TransformKind.DCT2, 64) == 32
    assert retained_count(TransformKind.DST7, 32) == 16
    assert retained_count(TransformKind.DCT8, 32) == 16
    assert retained_count(TransformKind.DCT2, 8) == 8
    assert retained_count(TransformKind.DST7, 16) == 16


def test_inverse_1d_dc_example():
    out = inverse_1d_matrix(TransformKind.DCT2, 4, [64, 0, 0, 0], 7)
    assert out.tolist() == [32, 32, 32, 32]


def test_inverse_1d_zero_is_zero():
    for kind, n in ((TransformKind.DCT2, 16), (TransformKind.DST7, 8)):
        out = inverse_1d_matrix(kind, n, np.zeros(n, dtype=int), 5)
        assert np.all(out == 0)


def test_inverse_1d_unit_impulse_extracts_row():
    # out = M^T c: an impulse at position 0 reads row 0 of the matrix.
    out = inverse_1d_matrix(TransformKind.DST7, 4, [1, 0, 0, 0], 0)
    assert out.tolist() == [29, 55, 74, 84]
    out = inverse_1d_matrix(TransformKind.DST7, 4, [0, 1, 0, 0], 0)
    assert out.tolist() == [74, 74, 0, -74]


def test_inverse_1d_rejects_bad_length_and_shift():
    with pytest.raises(ValueError):
        inverse_1d_matrix(TransformKind.DCT2, 4, [1, 2, 3], 7)
    with pytest.raises(ValueError):
        inverse_1d_matrix(TransformKind.DCT2, 4, [1, 2, 3, 4], -1)


def test_zeroing_lengths_and_tail_rejection():
    # 64-point DCT2 takes exactly 32 retained inputs
    retained = RNG.integers(-1000, 1000, size=32)
    out = inverse_1d_matrix(TransformKind.DCT2, 64, retained, 7)
    assert out.shape == (64,)
    full = np.zeros(64, dtype=int)
    full[:32] = retained
    assert np.array_equal(inverse_1d_matrix(TransformKind.DCT2, 64, full, 7), out)
    full[40] = 1
    with pytest.raises(ValueError):
        inverse_1d_matrix(TransformKind.DCT2, 64, full, 7)
    with pytest.raises(ValueError):
        inverse_dct2_butterfly(64, np.ones(33, dtype=int), 7)
    # 32-point DST7/DCT8 take exactly 16
    for kind in (TransformKind.DST7, TransformKind.DCT8):
        assert inverse_mts_shared(kind, 32, np.ones(16, dtype=int), 7).shape == (32,)
        bad = np.zeros(32, dtype=int)
        bad[20] = 3
        with pytest.raises(ValueError):
            inverse_mts_shared(kind, 32, bad, 7)


@pytest.mark.parametrize("n", DCT2_ORDERS)
def test_butterfly_equals_matrix_random(n):
    r = retained_count(TransformKind.DCT2, n)
    coeffs = RNG.integers(-32768, 32768, size=(4000, r))
    for shift in (0, 7, 12):
        a = inverse_1d_matrix(TransformKind.DCT2, n, coeffs, shift)
        b = inverse_dct2_butterfly(n, coeffs, shift)
        assert np.array_equal(a, b)


def test_butterfly_exhaustive_small_range():
    # full sweep of 4-point inputs over [-16, 15]
    grid = np.arange(-16, 16)
    c = np.stack(np.meshgrid(grid, grid, grid, grid, indexing="ij"), axis=-1).reshape(-1, 4)
    assert np.array_equal(
        inverse_1d_matrix(TransformKind.DCT2, 4, c, 7),
        inverse_dct2_butterfly(4, c, 7),
    )


def test_path_equivalence_dense_in_64_box():
    # dense randomized coverage of the [-64, 63] input box for all kinds
    coeffs = RNG.integers(-64, 64, size=(200000, 4))
    assert np.array_equal(
        inverse_1d_matrix(TransformKind.DCT2, 4, coeffs, 7),
        inverse_dct2_butterfly(4, coeffs, 7),
    )
    for kind in (TransformKind.DST7, TransformKind.DCT8):
        assert np.array_equal(
            inverse_1d_matrix(kind, 4, coeffs, 7),
            inverse_mts_shared(kind, 4, coeffs, 7),
        )


def test_butterfly_odd_row_antisymmetry():
    out = inverse_dct2_butterfly(4, [0, 77, 0, 0], 0)
    assert np.array_equal(out, -out[::-1])


@pytest.mark.parametrize("kind", [TransformKind.DST7, TransformKind.DCT8])
@pytest.mark.parametrize("n", MTS_ORDERS)
def test_shared_kernel_equals_matrix_random(kind, n):
    r = retained_count(kind, n)
    coeffs = RNG.integers(-32768, 32768, size=(4000, r))
    for shift in (0, 7, 12):
        a = inverse_1d_matrix(kind, n, coeffs, shift)
        b = inverse_mts_shared(kind, n, coeffs, shift)
        assert np.array_equal(a, b)


def test_shared_kernel_exhaustive_small_range():
    grid = np.arange(-16, 16)
    c = np.stack(np.meshgrid(grid, grid, grid, grid, indexing="ij"), axis=-1).reshape(-1, 4)
    for kind in (TransformKind.DST7, TransformKind.DCT8):
        assert np.array_equal(
            inverse_1d_matrix(kind, 4, c, 7),
            inverse_mts_shared(kind, 4, c, 7),
        )


def test_shared_kernel_dct8_impulse():
    out = inverse_mts_shared(TransformKind.DCT8, 4, [1, 0, 0, 0], 0)
    # row 0 of the DCT8 matrix (symmetric at order 4, so also column 0)
    assert out.tolist() == integer_matrix(TransformKind.DCT8, 4).entries[0].tolist()
    assert out.tolist() == integer_matrix(TransformKind.DCT8, 4).entries[:, 0].tolist()


def test_shared_kernel_rejects_dct2():
    with pytest.raises(ValueError):
        inverse_mts_shared(TransformKind.DCT2, 8, np.zeros(8, dtype=int), 7)


@given(
    st.sampled_from([(TransformKind.DCT2, n) for n in DCT2_ORDERS]
                    + [(k, n) for k in (TransformKind.DST7, TransformKind.DCT8)
                       for n in MTS_ORDERS]),
    st.integers(0, 2**32 - 1),
)
@settings(max_examples=60, deadline=None)
def test_linearity_before_clipping(kind_n, seed):
    kind, n = kind_n
    r = retained_count(kind, n)
    rng = np.random.default_rng(seed)
    # magnitudes low enough that |sum(a)| + |sum(b)| stays below the clamp
    limit = 32767 // (2 * r * 128)
    a = rng.integers(-limit, limit + 1, size=r)
    b = rng.integers(-limit, limit + 1, size=r)
    fa = inverse_1d_matrix(kind, n, a, 0)
    fb = inverse_1d_matrix(kind, n, b, 0)
    fab = inverse_1d_matrix(kind, n, a + b, 0)
    assert np.array_equal(fab, fa + fb)


def test_dct2_impulse_palindromes():
    m = 16
    for i in range(m):
        coeffs = np.zeros(m, dtype=int)
        coeffs[i] = 100
        out = inverse_1d_matrix(TransformKind.DCT2, m, coeffs, 0)
        if i % 2 == 0:
            assert np.array_equal(out, out[::-1])
        else:
            assert np.array_equal(out, -out[::-1])


# --- 2-D ---------------------------------------------------------------------


def test_inverse_2d_zero_block():
    spec = TransformSpec.square(TransformKind.DST7, 8)
    out = inverse_2d(spec, np.zeros((8, 8), dtype=int))
    assert np.all(out.samples == 0)


def test_inverse_2d_dc_examples():
    spec = TransformSpec.square(TransformKind.DCT2, 4)
    dc = np.zeros((4, 4), dtype=int)
    dc[0, 0] = 4096
    out = inverse_2d(spec, dc)
    assert np.all(out.samples == 32)  # ((4096*64+64)>>7 * 64 + 2^11) >> 12
    assert np.array_equal(out.samples, whole_matrix_2d_oracle(spec, dc))
    dc[0, 0] = 256
    out = inverse_2d(spec, dc)
    assert np.all(out.samples == 2)
    assert np.array_equal(out.samples, whole_matrix_2d_oracle(spec, dc))


@pytest.mark.parametrize(
    "kh,kv,sh,sv",
    [
        (TransformKind.DCT2, TransformKind.DCT2, 8, 8),
        (TransformKind.DCT2, TransformKind.DCT2, 64, 16),
        (TransformKind.DST7, TransformKind.DCT8, 4, 32),
        (TransformKind.DCT8, TransformKind.DCT8, 16, 8),
        (TransformKind.DST7, TransformKind.DST7, 32, 32),
    ],
)
def test_inverse_2d_matches_whole_matrix_oracle(kh, kv, sh, sv):
    for bit_depth in (8, 10):
        spec = TransformSpec(kh, kv, sh, sv, bit_depth)
        rv = retained_count(kv, sv)
        rh = retained_count(kh, sh)
        full = np.zeros((sv, sh), dtype=np.int64)
        full[:rv, :rh] = RNG.integers(-32768, 32768, size=(rv, rh))
        got = inverse_2d(spec, full)
        assert np.array_equal(got.samples, whole_matrix_2d_oracle(spec, full))
        # trimmed retained-region input is equivalent
        trimmed = inverse_2d(spec, full[:rv, :rh])
        assert np.array_equal(trimmed.samples, got.samples)


def test_inverse_2d_rejects_nonzero_zeroed_region():
    spec = TransformSpec.square(TransformKind.DCT2, 64)
    full = np.zeros((64, 64), dtype=int)
    full[40, 2] = 1
    with pytest.raises(ValueError):
        inverse_2d(spec, full)
    with pytest.raises(ValueError):
        inverse_2d(spec, np.zeros((16, 16), dtype=int))  # neither retained nor full


def test_inverse_2d_stage1_outputs_fit_16_bits():
    # instrumented sweep: worst-case 16-bit inputs keep the clipped
    # intermediate within signed 16 bits by construction
    spec = TransformSpec.square(TransformKind.DCT2, 32)
    for _ in range(50):
        coeffs = RNG.integers(-32768, 32768, size=(32, 32))
        block, clips = inverse_2d(spec, coeffs, return_stats=True)
        assert block.samples.max() <= 32767 and block.samples.min() >= -32768
        assert clips >= 0


def test_transform_spec_legality():
    with pytest.raises(ValueError):
        TransformSpec(TransformKind.DCT2, TransformKind.DST7, 8, 8)
    with pytest.raises(ValueError):
        TransformSpec(TransformKind.DST7, TransformKind.DST7, 64, 8)
    with pytest.raises(ValueError):
        TransformSpec(TransformKind.DCT2, TransformKind.DCT2, 8, 8, bit_depth=12)
    spec = TransformSpec(TransformKind.DST7, TransformKind.DCT8, 4, 32)
    assert spec.size_h == 4 and spec.size_v == 32


def test_forward_2d_zero_and_constant():
    spec = TransformSpec.square(TransformKind.DCT2, 4)
    out = forward_2d(spec, np.zeros((4, 4), dtype=int))
    assert np.all(out.samples == 0)
    const = forward_2d(spec, np.full((4, 4), 10, dtype=int))
    assert const.samples[0, 0] != 0
    others = const.samples.copy()
    others[0, 0] = 0
    assert np.all(others == 0)


def test_forward_2d_zeroes_high_region():
    spec = TransformSpec.square(TransformKind.DST7, 32)
    coeffs = forward_2d(spec, RNG.integers(-128, 128, size=(32, 32)))
    assert np.all(coeffs.samples[16:, :] == 0)
    assert np.all(coeffs.samples[:, 16:] == 0)


def test_forward_2d_dimension_mismatch():
    spec = TransformSpec.square(TransformKind.DCT2, 8)
    with pytest.raises(ValueError):
        forward_2d(spec, np.zeros((4, 8), dtype=int))


def test_round_trip_small_full_config():
    spec = TransformSpec.square(TransformKind.DCT2, 8)
    for _ in range(40):
        resid = RNG.integers(-128, 128, size=(8, 8))
        back = inverse_2d(spec, forward_2d(spec, resid).samples)
        assert np.max(np.abs(back.samples.astype(np.int64) - resid)) <= 3


def test_clip16_bounds():
    arr = np.array([40000, -40000, 5])
    assert clip16(arr).tolist() == [32767, -32768, 5]


# --- block files -------------------------------------------------------------


def test_block_file_text_round_trip(tmp_path):
    samples = RNG.integers(-3000, 3000, size=(8, 4)).astype(np.int32)
    bf = BlockFile(Block(samples), TransformKind.DST7, TransformKind.DCT8, 10)
    path = tmp_path / "block.blk"
    write_block_text(path, bf)
    back = read_block(path)
    assert np.array_equal(back.block.samples, samples)
    assert back.kind_h == TransformKind.DST7
    assert back.kind_v == TransformKind.DCT8
    assert back.bit_depth == 10
    assert back.block.width == 4 and back.block.height == 8


def test_block_file_binary_round_trip(tmp_path):
    samples = RNG.integers(-32768, 32768, size=(16, 32)).astype(np.int32)
    bf = BlockFile(Block(samples), TransformKind.DCT2, TransformKind.DCT2, 8)
    path = tmp_path / "block.bin"
    write_block_binary(path, bf)
    back = read_block(path)
    assert np.array_equal(back.block.samples, samples)
    assert back.kind_h == TransformKind.DCT2


def test_block_file_parse_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.blk"
    path.write_text("4 2 8 dct2 dct2\n1 2 3 4\n1 2 x 4\n")
    with pytest.raises(ValueError, match=":3"):
        read_block(path)
    path.write_text("4 2 8 dct2 dct2\n1 2 3\n1 2 3 4\n")
    with pytest.raises(ValueError, match=":2"):
        read_block(path)
    path.write_text("4 2 8 nope dct2\n")
    with pytest.raises(ValueError, match=":1"):
        read_block(path)


def test_block_range_validation():
    with pytest.raises(ValueError):
        Block(np.array([[40000]]), bit_width=16)
    Block(np.array([[32767, -32768]]), bit_width=16)
