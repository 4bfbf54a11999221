"""Affine integer quantization of the codebook and its analytical error bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import QabbaError, QuantMode, QuantSpec
from .digitization import Codebook


class InvalidRange(QabbaError):
    pass


class InvalidBits(QabbaError):
    pass


class CodeOutOfRange(QabbaError):
    pass


@dataclass(frozen=True)
class QuantParams:
    """Scale ``s``, zero-point ``z`` and code range for one bit-width.

    ``Q(x) = clip(round(x / s - z), qmin, qmax)`` and ``Q^-1(q) = s * (q + z)``.
    """

    scale: float
    zero_point: int
    bits: int
    qmin: int
    qmax: int
    lo: float
    hi: float
    mode: QuantMode = QuantMode.ASYMMETRIC


def code_range(bits: int) -> tuple[int, int]:
    return -(2 ** (bits - 1)), 2 ** (bits - 1) - 1


def round_half_away(x):
    """Round to nearest, ties away from zero (platform-independent)."""
    x = np.asarray(x, dtype=np.float64)
    r = np.trunc(x)
    return r + np.where(np.abs(x - r) >= 0.5, np.sign(x), 0.0)


def make_params(lo: float, hi: float, bits: int, mode: QuantMode = QuantMode.ASYMMETRIC) -> QuantParams:
    """Quantization parameters covering ``[lo, hi]`` with ``bits``-bit codes.

    Asymmetric mode picks ``z`` so that ``Q(lo) == qmin``; symmetric mode
    widens the range to ``[-m, m]`` with ``m = max(|lo|, |hi|)`` and fixes
    ``z = 0``. A collapsed range ``lo == hi`` is widened by
    ``max(1e-8, |lo| * 1e-8)`` on each side.
    """
    if isinstance(bits, bool) or int(bits) != bits or not 2 <= bits <= 32:
        raise InvalidBits(f"bit-width must be an integer in [2, 32], got {bits}")
    bits = int(bits)
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise InvalidRange("range endpoints must be finite")
    if hi < lo:
        raise InvalidRange(f"hi ({hi}) < lo ({lo})")
    if hi == lo:
        eps = max(1e-8, abs(lo) * 1e-8)
        lo, hi = lo - eps, hi + eps
    mode = QuantMode(mode)
    qmin, qmax = code_range(bits)
    if mode is QuantMode.SYMMETRIC:
        m = max(abs(lo), abs(hi))
        lo, hi = -m, m
        scale = (hi - lo) / (qmax - qmin)
        z = 0
    else:
        scale = (hi - lo) / (qmax - qmin)
        z = int(round_half_away(lo / scale)) - qmin
    return QuantParams(scale, z, bits, qmin, qmax, lo, hi, mode)


def quantize(x, p: QuantParams):
    """Integer code(s) for ``x``; values outside the range are clipped."""
    v = round_half_away(np.asarray(x, dtype=np.float64) / p.scale - p.zero_point)
    q = np.clip(v, p.qmin, p.qmax).astype(np.int64)
    return int(q) if q.ndim == 0 else q


def dequantize(q, p: QuantParams):
    """Real value(s) ``s * (q + z)`` for code(s) ``q``."""
    qa = np.asarray(q, dtype=np.int64)
    if np.any(qa < p.qmin) or np.any(qa > p.qmax):
        raise CodeOutOfRange(f"codes must lie in [{p.qmin}, {p.qmax}]")
    # q + z in exact integer arithmetic, then a single rounding to float
    if abs(p.zero_point) < 2**62:
        shifted = (qa + np.int64(p.zero_point)).astype(np.float64)
    else:
        shifted = np.array([float(int(v) + p.zero_point) for v in qa.reshape(-1)]).reshape(qa.shape)
    y = p.scale * shifted
    return float(y) if y.ndim == 0 else y


@dataclass(frozen=True, eq=False)
class QuantizedCodebookState:
    q_lens: np.ndarray
    q_incs: np.ndarray
    params_len: QuantParams
    params_inc: QuantParams

    def __post_init__(self):
        for name, p in (("q_lens", self.params_len), ("q_incs", self.params_inc)):
            q = np.array(getattr(self, name), dtype=np.int64).reshape(-1)
            if np.any(q < p.qmin) or np.any(q > p.qmax):
                raise CodeOutOfRange(f"{name} outside [{p.qmin}, {p.qmax}]")
            q.setflags(write=False)
            object.__setattr__(self, name, q)
        if self.q_lens.shape != self.q_incs.shape:
            raise QabbaError("length and increment rows differ in size")

    @property
    def k(self) -> int:
        return self.q_lens.shape[0]

    def centers(self) -> np.ndarray:
        """Dequantized ``(k, 2)`` centers."""
        return np.column_stack([dequantize(self.q_lens, self.params_len), dequantize(self.q_incs, self.params_inc)])

    def __eq__(self, other):
        if not isinstance(other, QuantizedCodebookState):
            return NotImplemented
        return (np.array_equal(self.q_lens, other.q_lens) and np.array_equal(self.q_incs, other.q_incs)
                and self.params_len == other.params_len and self.params_inc == other.params_inc)

    __hash__ = None


def _f32_down(x: float) -> float:
    v = np.float32(x)
    if float(v) > x:
        v = np.nextafter(v, np.float32(-np.inf))
    return float(v)


def _f32_up(x: float) -> float:
    v = np.float32(x)
    if float(v) < x:
        v = np.nextafter(v, np.float32(np.inf))
    return float(v)


def row_params(values, bits: int, mode: QuantMode) -> QuantParams:
    """Params for one codebook row.

    The row's min/max are rounded outward to float32 (after the usual
    widening of a collapsed range) so that the container, which stores the
    range at 32 bits, rebuilds exactly the same params.
    """
    v = np.asarray(values, dtype=np.float64)
    lo, hi = float(v.min()), float(v.max())
    if _f32_down(lo) == _f32_up(hi):
        eps = max(1e-8, abs(lo) * 1e-8)
        lo, hi = lo - eps, hi + eps
    return make_params(_f32_down(lo), _f32_up(hi), bits, mode)


def quantize_codebook(cb: Codebook, spec: QuantSpec) -> QuantizedCodebookState:
    """Quantize the length and increment rows independently."""
    pl = row_params(cb.centers[:, 0], spec.bits_len, spec.mode)
    pi = row_params(cb.centers[:, 1], spec.bits_inc, spec.mode)
    return QuantizedCodebookState(quantize(cb.centers[:, 0], pl), quantize(cb.centers[:, 1], pi), pl, pi)


def dequantize_codebook(state: QuantizedCodebookState, counts=None) -> Codebook:
    if counts is None:
        counts = np.zeros(state.k, dtype=np.int64)
    return Codebook(state.centers(), counts)


def rounding_bound(lo: float, hi: float, bits: int) -> float:
    """Largest ``|Q^-1(Q(x)) - x|`` for ``x`` in ``[lo, hi]``: ``(hi - lo) / (2**(bits+1) - 2)``."""
    return (hi - lo) / (2.0 ** (bits + 1) - 2.0)


def frobenius_bound(k: int, lo: float, hi: float, bits: int) -> float:
    """Ceiling on ``||C_deq - C||_F`` for a ``2 x k`` codebook sharing one range."""
    return math.sqrt(2 * k) * rounding_bound(lo, hi, bits)


def sse_quantization_bound(sse: float, N: int, lo: float, hi: float, bits: int) -> float:
    """``sse + 2N (hi - lo)^2 / (2^(bits+1) - 2)^2``: ceiling on the SSE after
    replacing mean centers by their quantized values."""
    if sse < 0 or N < 0:
        raise QabbaError("sse and N must be nonnegative")
    return sse + 2.0 * N * rounding_bound(lo, hi, bits) ** 2


def codebook_sse_bound(sse: float, N: int, state: QuantizedCodebookState) -> float:
    """Per-row application of :func:`sse_quantization_bound`, summed."""
    extra = 0.0
    for p in (state.params_len, state.params_inc):
        extra += sse_quantization_bound(0.0, N, p.lo, p.hi, p.bits)
    return sse + extra
