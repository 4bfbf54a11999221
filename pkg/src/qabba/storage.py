"""Storage accounting and the ``.qabba`` binary container.

Container layout (little-endian)::

    magic    b"QABA1"
    version  u8
    flags    u8   bit0 codebook quantized, bit1 16-bit symbols, bit2 symmetric
    bits_len u8,  bits_inc u8   (32/32 when unquantized)
    k        u16, N u32, n u32, p u16
    initial  p x f32
    quantized:   per row (len, inc): lo f32, hi f32
                 then per row: k codes, ``bits`` each, two's complement,
                 MSB first, zero-padded to a byte boundary
    unquantized: k x f32 lengths, then k x f32 increments
    symbols  N x (u8 | u16)
    crc32    u32 of everything above

Quantization params are rebuilt from the stored (lo, hi) pair with
:func:`qabba.quantization.make_params`, so decoding reproduces them exactly.
"""
from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .core import QabbaError, QuantMode
from .digitization import Codebook
from .pipeline import SymbolicArtifact
from .quantization import QuantizedCodebookState, make_params

MAGIC = b"QABA1"
VERSION = 1
FLAG_QUANTIZED = 1
FLAG_WIDE_SYMBOLS = 2
FLAG_SYMMETRIC = 4

_HEAD = struct.Struct("<5sBBBBHIIH")

#: Bits outside the storage-formula numerator that every container carries:
#: the fixed header (magic through p) plus the trailing CRC-32.
HEADER_BITS = 8 * (_HEAD.size + 4)
#: Quantized containers hold two reals per row (four in total); the formula
#: budgets ``2 * B_s`` for the parameters, so 64 bits are on top of it.
QUANT_EXTRA_BITS = 64


class TooManyClusters(QabbaError):
    pass


class TooManySymbols(QabbaError):
    pass


class BadMagic(QabbaError):
    pass


class UnsupportedVersion(QabbaError):
    pass


class Truncated(QabbaError):
    pass


class ChecksumMismatch(QabbaError):
    pass


@dataclass(frozen=True)
class StorageModel:
    """Bit budget of one symbolic representation.

    ``B_sym`` is the width of one stored symbol (8 in the classic count).
    """

    B_T: int = 32
    B_len: int = 32
    B_inc: int = 32
    B_s: int = 32
    p: int = 1
    N: int = 1
    k: int = 1
    n: int = 2
    B_sym: int = 8

    def __post_init__(self):
        if min(self.B_T, self.B_len, self.B_inc, self.p, self.N, self.k, self.n, self.B_sym) <= 0 or self.B_s < 0:
            raise QabbaError("storage model fields must be positive")
        if self.N > self.n:
            raise QabbaError("more pieces than samples")


def abba_bits(m: StorageModel) -> int:
    return m.B_sym * m.N + (m.B_len + m.B_inc) * m.k + m.p * m.B_T


def qabba_bits(m: StorageModel) -> int:
    return abba_bits(m) + 2 * m.B_s


def ratio_abba(m: StorageModel) -> float:
    """Compressed over raw bits, full-precision codebook."""
    return abba_bits(m) / (m.B_T * m.n)


def ratio_qabba(m: StorageModel) -> float:
    """As :func:`ratio_abba` plus two quantization parameters of ``B_s`` bits."""
    return qabba_bits(m) / (m.B_T * m.n)


def symbol_bits(k: int) -> int:
    return 8 if k <= 256 else 16


def storage_model(a: SymbolicArtifact, B_T: int = 32) -> StorageModel:
    """The model matching what :func:`encode` writes for ``a``."""
    if a.quant is not None:
        bl, bi, bs = a.quant.params_len.bits, a.quant.params_inc.bits, 32
    else:
        bl, bi, bs = 32, 32, 0
    return StorageModel(B_T=B_T, B_len=bl, B_inc=bi, B_s=bs, p=len(a.initial_values),
                        N=a.N, k=a.k, n=a.series_length, B_sym=symbol_bits(a.k))


def theoretical_ratio(a: SymbolicArtifact) -> float:
    m = storage_model(a)
    return ratio_qabba(m) if a.quant is not None else ratio_abba(m)


def padding_bits(a: SymbolicArtifact) -> int:
    """Zero bits that round each packed code row up to whole bytes."""
    if a.quant is None:
        return 0
    return sum(-(a.k * p.bits) % 8 for p in (a.quant.params_len, a.quant.params_inc))


def container_overhead_bits(a: SymbolicArtifact) -> int:
    """``8 * len(encode(a))`` minus the storage-formula numerator."""
    extra = QUANT_EXTRA_BITS + padding_bits(a) if a.quant is not None else 0
    return HEADER_BITS + extra


def pack_codes(codes, bits: int) -> bytes:
    u = np.asarray(codes, dtype=np.int64) & ((1 << bits) - 1)
    shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)
    bitmat = ((u[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    return np.packbits(bitmat.reshape(-1)).tobytes()


def unpack_codes(buf: bytes, count: int, bits: int) -> np.ndarray:
    flat = np.unpackbits(np.frombuffer(buf, dtype=np.uint8))[: count * bits]
    weights = np.int64(1) << np.arange(bits - 1, -1, -1, dtype=np.int64)
    u = (flat.reshape(count, bits).astype(np.int64) * weights).sum(axis=1)
    return np.where(u >= (1 << (bits - 1)), u - (1 << bits), u)


def encode(a: SymbolicArtifact) -> bytes:
    k, N, p = a.k, a.N, len(a.initial_values)
    if k > 0xFFFF:
        raise TooManyClusters(f"k={k} exceeds 65535")
    if N > 0xFFFFFFFF or a.series_length > 0xFFFFFFFF:
        raise TooManySymbols(f"N={N} exceeds 2**32 - 1")
    wide = k > 256
    flags = FLAG_WIDE_SYMBOLS if wide else 0
    q = a.quant
    if q is not None:
        flags |= FLAG_QUANTIZED
        if q.params_len.mode is QuantMode.SYMMETRIC:
            flags |= FLAG_SYMMETRIC
        bl, bi = q.params_len.bits, q.params_inc.bits
    else:
        bl = bi = 32
    out = bytearray(_HEAD.pack(MAGIC, VERSION, flags, bl, bi, k, N, a.series_length, p))
    out += np.asarray(a.initial_values, dtype="<f4").tobytes()
    if q is not None:
        for prm in (q.params_len, q.params_inc):
            out += np.array([prm.lo, prm.hi], dtype="<f4").tobytes()
        out += pack_codes(q.q_lens, bl)
        out += pack_codes(q.q_incs, bi)
    else:
        c = a.codebook.centers
        out += np.concatenate([c[:, 0], c[:, 1]]).astype("<f4").tobytes()
    out += a.symbols.astype("<u2" if wide else "u1").tobytes()
    out += struct.pack("<I", zlib.crc32(out))
    return bytes(out)


def _expected_size(flags: int, bl: int, bi: int, k: int, N: int, p: int) -> int:
    size = _HEAD.size + 4 * p
    if flags & FLAG_QUANTIZED:
        size += 16 + math.ceil(k * bl / 8) + math.ceil(k * bi / 8)
    else:
        size += 8 * k
    return size + N * (2 if flags & FLAG_WIDE_SYMBOLS else 1) + 4


def decode(data: bytes) -> SymbolicArtifact:
    data = bytes(data)
    if len(data) < len(MAGIC):
        raise Truncated("container shorter than its magic")
    if data[: len(MAGIC)] != MAGIC:
        raise BadMagic("not a .qabba container")
    if len(data) < _HEAD.size:
        raise Truncated("container header cut short")
    _, version, flags, bl, bi, k, N, n, p = _HEAD.unpack_from(data)
    if version != VERSION:
        raise UnsupportedVersion(f"container version {version}, expected {VERSION}")
    size = _expected_size(flags, bl, bi, k, N, p)
    if len(data) < size:
        raise Truncated(f"container has {len(data)} bytes, header promises {size}")
    if len(data) > size:
        raise ChecksumMismatch(f"{len(data) - size} trailing bytes after checksum")
    (crc,) = struct.unpack_from("<I", data, size - 4)
    if zlib.crc32(data[: size - 4]) != crc:
        raise ChecksumMismatch("CRC-32 does not match contents")

    pos = _HEAD.size
    init = np.frombuffer(data, "<f4", p, pos).astype(np.float64)
    pos += 4 * p
    quant = None
    if flags & FLAG_QUANTIZED:
        mode = QuantMode.SYMMETRIC if flags & FLAG_SYMMETRIC else QuantMode.ASYMMETRIC
        ranges = np.frombuffer(data, "<f4", 4, pos).astype(np.float64)
        pos += 16
        pl = make_params(ranges[0], ranges[1], bl, mode)
        pi = make_params(ranges[2], ranges[3], bi, mode)
        nl, ni = math.ceil(k * bl / 8), math.ceil(k * bi / 8)
        ql = unpack_codes(data[pos: pos + nl], k, bl)
        pos += nl
        qi = unpack_codes(data[pos: pos + ni], k, bi)
        pos += ni
        quant = QuantizedCodebookState(ql, qi, pl, pi)
        centers = quant.centers()
    else:
        raw = np.frombuffer(data, "<f4", 2 * k, pos).astype(np.float64)
        pos += 8 * k
        centers = np.column_stack([raw[:k], raw[k:]])
    symbols = np.frombuffer(data, "<u2" if flags & FLAG_WIDE_SYMBOLS else "u1", N, pos).astype(np.int64)
    counts = np.bincount(symbols, minlength=k)
    if counts.shape[0] > k:
        raise ChecksumMismatch("symbol outside the codebook")
    return SymbolicArtifact(tuple(init.tolist()), symbols, Codebook(centers, counts), n, quant)


def save(a: SymbolicArtifact, path) -> int:
    """Write atomically (temp file + rename); returns the byte count."""
    from ._io import atomic_write_bytes

    blob = encode(a)
    atomic_write_bytes(path, blob)
    return len(blob)


def load(path) -> SymbolicArtifact:
    with open(path, "rb") as fh:
        return decode(fh.read())
