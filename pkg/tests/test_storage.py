import math
import struct
import zlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qabba.core import CompressionParams, DigitizationParams, PipelineConfig, QuantMode, QuantSpec
from qabba.digitization import Codebook
from qabba.pipeline import SymbolicArtifact, apply_quantization, reconstruct, symbolize
from qabba.storage import (
    HEADER_BITS, QUANT_EXTRA_BITS, BadMagic, ChecksumMismatch, StorageModel, TooManyClusters, Truncated,
    UnsupportedVersion, abba_bits, container_overhead_bits, decode, encode, pack_codes, qabba_bits, ratio_abba,
    ratio_qabba, storage_model, unpack_codes,
)


def artifact(k, N, n=None, quant=None, seed=0):
    rng = np.random.default_rng(seed)
    centers = np.column_stack([rng.uniform(1, 9, k), rng.normal(0, 2, k)])
    sym = np.concatenate([np.arange(k), rng.integers(0, k, max(N - k, 0))])[:N]
    a = SymbolicArtifact((float(rng.normal()),), sym, Codebook(centers, np.bincount(sym, minlength=k)),
                         n or 10 * N + 1)
    return apply_quantization(a, quant)


def test_ratio_examples():
    m = StorageModel(B_T=32, B_len=32, B_inc=32, p=1, N=10, k=5, n=1000)
    assert ratio_abba(m) == pytest.approx(0.0135, abs=1e-12)
    q = StorageModel(B_T=32, B_len=8, B_inc=12, B_s=32, p=1, N=10, k=5, n=1000)
    assert ratio_qabba(q) == pytest.approx(0.008625, abs=1e-12)


def test_qabba_specialisation_formula():
    for N, k, n in [(10, 5, 1000), (300, 17, 5000), (1, 1, 2)]:
        m = StorageModel(B_T=32, B_len=8, B_inc=12, B_s=32, p=1, N=N, k=k, n=n)
        assert ratio_qabba(m) == pytest.approx((8 * N + 20 * k + 96) / (32 * n), rel=1e-15)


def test_ratio_properties():
    worst = StorageModel(N=100, k=100, n=100)
    assert ratio_abba(worst) > 1
    m = StorageModel(N=10, k=5, n=1000)
    assert ratio_abba(StorageModel(N=10, k=5, n=2000)) == pytest.approx(ratio_abba(m) / 2, rel=1e-15)
    assert ratio_qabba(StorageModel(N=10, k=5, n=1000, B_s=0)) == ratio_abba(m)
    assert ratio_qabba(m) - ratio_abba(m) == pytest.approx(2 * m.B_s / (m.B_T * m.n), rel=1e-12)
    for k in range(3, 50):
        a = StorageModel(N=40, k=k, n=500)
        q = StorageModel(B_len=8, B_inc=12, N=40, k=k, n=500)
        assert ratio_qabba(q) < ratio_abba(a)


def test_pack_codes_round_trip(rng):
    for bits in (2, 3, 8, 12, 17, 32):
        lo, hi = -(2 ** (bits - 1)), 2 ** (bits - 1) - 1
        codes = rng.integers(lo, hi + 1, 13)
        codes[:2] = [lo, hi]
        buf = pack_codes(codes, bits)
        assert len(buf) == math.ceil(13 * bits / 8)
        np.testing.assert_array_equal(unpack_codes(buf, 13, bits), codes)


def test_pack_codes_msb_first():
    assert pack_codes([1, -1], 4) == bytes([0b0001_1111])


def test_minimal_artifact():
    a = artifact(1, 1, n=5)
    blob = encode(a)
    assert len(blob) == 21 + 4 + 8 + 1 + 4
    assert decode(blob) == a.at_storage_precision()


def test_quantized_row_sizes():
    a = artifact(5, 40, quant=QuantSpec(8, 12))
    blob = encode(a)
    # header 21, initial 4, ranges 16, len codes 5, inc codes 8, symbols 40, crc 4
    assert len(blob) == 21 + 4 + 16 + 5 + 8 + 40 + 4


@pytest.mark.parametrize("k,bits", [(5, (8, 12)), (8, (8, 12)), (3, (5, 7)), (300, (8, 16)), (1, (2, 2))])
def test_payload_bits_match_formula(k, bits):
    a = artifact(k, 2 * k + 3, quant=QuantSpec(*bits))
    m = storage_model(a)
    assert 8 * len(encode(a)) == qabba_bits(m) + container_overhead_bits(a)
    if k * bits[0] % 8 == 0 and k * bits[1] % 8 == 0:
        assert container_overhead_bits(a) == HEADER_BITS + QUANT_EXTRA_BITS
    plain = artifact(k, 2 * k + 3)
    assert 8 * len(encode(plain)) == abba_bits(storage_model(plain)) + HEADER_BITS


def test_wide_symbols():
    a = artifact(300, 700)
    assert storage_model(a).B_sym == 16
    assert decode(encode(a)) == a.at_storage_precision()


def test_quantized_break_even_at_three_symbols():
    """Four stored range values cost 128 bits, so at (8, 12) bits three
    centers take as many bytes as the float32 codebook; four save bytes."""
    for k, cmp in [(3, 0), (4, -1), (10, -1)]:
        q, u = artifact(k, 50, quant=QuantSpec(8, 12)), artifact(k, 50)
        assert np.sign(len(encode(q)) - len(encode(u))) == cmp


def test_decode_errors():
    blob = encode(artifact(4, 20, quant=QuantSpec()))
    bad = bytearray(blob)
    bad[0] ^= 0xFF
    with pytest.raises(BadMagic):
        decode(bytes(bad))
    for cut in (0, 3, 10, len(blob) - 1):
        with pytest.raises(Truncated):
            decode(blob[:cut])
    bad = bytearray(blob)
    bad[30] ^= 0x01
    with pytest.raises(ChecksumMismatch):
        decode(bytes(bad))
    with pytest.raises(ChecksumMismatch):
        decode(blob + b"\0")
    bad = bytearray(blob[:-4])
    bad[5] = 9
    with pytest.raises(UnsupportedVersion):
        decode(bytes(bad) + struct.pack("<I", zlib.crc32(bytes(bad))))


def test_too_many_clusters():
    a = artifact(1, 1)
    big = SymbolicArtifact((0.0,), [0], Codebook(np.ones((70000, 2)), np.ones(70000)), 10)
    with pytest.raises(TooManyClusters):
        encode(big)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(0, 200), st.integers(0, 2**31), st.booleans(),
       st.integers(2, 32), st.integers(2, 32), st.sampled_from(list(QuantMode)))
def test_round_trip_fuzz(k, extra, seed, quantized, bl, bi, mode):
    quant = QuantSpec(bl, bi, mode) if quantized else None
    a = artifact(k, k + extra, quant=quant, seed=seed)
    got = decode(encode(a))
    assert got == a.at_storage_precision()
    assert encode(got) == encode(a)


def test_round_trip_real_pipeline_and_constant_series(rng):
    for t in (np.cumsum(rng.standard_normal(700)), np.full(50, 3.25), np.full(50, 0.1)):
        for quant in (None, QuantSpec(8, 12), QuantSpec(4, 6, QuantMode.SYMMETRIC)):
            a = symbolize(t, PipelineConfig(CompressionParams(0.2), DigitizationParams(alpha=0.3), quant))
            got = decode(encode(a))
            assert got == a.at_storage_precision()
            assert reconstruct(got) == reconstruct(a.at_storage_precision())
