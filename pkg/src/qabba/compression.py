"""Adaptive polygonal-chain compression and its exact inverse."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .core import CompressionParams, Piece, QabbaError, Series, array_to_pieces, pieces_to_array, validate_series


class IndexOutOfBounds(QabbaError):
    pass


class EmptyPieces(QabbaError):
    pass


@dataclass(frozen=True)
class Segment:
    start_index: int
    end_index: int

    def __post_init__(self):
        if not self.start_index < self.end_index:
            raise IndexOutOfBounds(f"segment needs start < end, got {self.start_index}..{self.end_index}")


def check_piece_criterion(s, seg: Segment, tol: float) -> bool:
    """True when the samples of ``seg`` stay within ``(len - 1) * tol**2``
    squared distance of the chord joining its endpoints."""
    t = s.samples if isinstance(s, Series) else np.asarray(s, dtype=np.float64)
    if seg.start_index < 0 or seg.end_index >= t.shape[0]:
        raise IndexOutOfBounds(f"segment {seg.start_index}..{seg.end_index} outside series of length {t.shape[0]}")
    width = seg.end_index - seg.start_index
    return _backend.segment_sse(t, seg.start_index, seg.end_index) <= (width - 1) * tol * tol


def breakpoints(s, params: CompressionParams) -> np.ndarray:
    """Indices ``0 = i_0 < i_1 < ... < i_N = n - 1`` chosen by the greedy scan."""
    s = validate_series(s)
    return _backend.compress_breakpoints(s.samples, float(params.tol), int(params.max_len or 0))


def compress_array(s, params: CompressionParams) -> np.ndarray:
    """Like :func:`compress` but returns an ``(N, 2)`` array of (len, inc)."""
    s = validate_series(s)
    bps = breakpoints(s, params)
    t = s.samples
    return np.column_stack([np.diff(bps).astype(np.float64), np.diff(t[bps])])


def compress(s, params: CompressionParams) -> list[Piece]:
    """Compress ``s`` into pieces, each as long as the tolerance allows."""
    return array_to_pieces(compress_array(s, params))


def inverse_compress(initial: float, pieces: Sequence[Piece] | np.ndarray) -> Series:
    """Rebuild the polygonal chain from its first value and (len, inc) pieces."""
    arr = pieces_to_array(pieces)
    if arr.shape[0] == 0:
        raise EmptyPieces("cannot rebuild a series from zero pieces")
    lens = arr[:, 0]
    if np.any(lens < 1) or np.any(lens != np.round(lens)):
        raise QabbaError("piece lengths must be integers >= 1")
    lens = lens.astype(np.int64)
    incs = arr[:, 1]
    out = np.empty(int(lens.sum()) + 1)
    out[0] = initial
    pos = 0
    acc = float(initial)
    comp = 0.0  # Neumaier compensation keeps breakpoints from drifting
    v = acc
    for ln, inc in zip(lens.tolist(), incs.tolist()):
        total = acc + inc
        if abs(acc) >= abs(inc):
            comp += (acc - total) + inc
        else:
            comp += (inc - total) + acc
        acc = total
        end = acc + comp
        seg = v + inc * np.arange(1, ln + 1, dtype=np.float64) / ln
        seg[-1] = end
        out[pos + 1:pos + ln + 1] = seg
        pos += ln
        v = end
    return Series(out)
