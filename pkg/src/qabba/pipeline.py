"""End-to-end symbolization and reconstruction."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .compression import compress_array, inverse_compress
from .core import PipelineConfig, QabbaError, QuantSpec, Series, f32, validate_series
from .digitization import Codebook, digitize, inverse_digitize, round_lengths_with_carry
from .quantization import QuantizedCodebookState, quantize_codebook


class CorruptArtifact(QabbaError):
    pass


class ChannelError(QabbaError):
    def __init__(self, channel: int, cause: Exception):
        super().__init__(f"channel {channel}: {cause}")
        self.channel = channel
        self.__cause__ = cause


@dataclass(frozen=True, eq=False)
class SymbolicArtifact:
    """Everything needed to rebuild a series from its symbols.

    When ``quant`` is set, ``codebook.centers`` already holds the dequantized
    values, so reconstruction never needs the integer codes.
    """

    initial_values: tuple
    symbols: np.ndarray
    codebook: Codebook
    series_length: int
    quant: Optional[QuantizedCodebookState] = None
    params_echo: Optional[PipelineConfig] = field(default=None, compare=False)

    def __post_init__(self):
        sym = np.array(self.symbols, dtype=np.int64).reshape(-1)
        sym.setflags(write=False)
        object.__setattr__(self, "symbols", sym)
        object.__setattr__(self, "initial_values", tuple(float(v) for v in self.initial_values))
        if sym.size and (sym.min() < 0 or sym.max() >= self.codebook.k):
            raise CorruptArtifact(f"symbol outside [0, {self.codebook.k})")
        if self.quant is not None and self.quant.k != self.codebook.k:
            raise CorruptArtifact("quantized codebook size differs from codebook")

    @property
    def k(self) -> int:
        return self.codebook.k

    @property
    def N(self) -> int:
        return self.symbols.shape[0]

    def at_storage_precision(self) -> "SymbolicArtifact":
        """Copy with every persisted real rounded to float32, as the container holds it."""
        cb = self.codebook if self.quant is not None else Codebook(f32(self.codebook.centers), self.codebook.counts)
        return replace(self, initial_values=tuple(f32(self.initial_values).tolist()), codebook=cb)

    def __eq__(self, other):
        if not isinstance(other, SymbolicArtifact):
            return NotImplemented
        return (self.initial_values == other.initial_values and np.array_equal(self.symbols, other.symbols)
                and self.codebook == other.codebook and self.series_length == other.series_length
                and self.quant == other.quant)

    __hash__ = None


def apply_quantization(a: SymbolicArtifact, spec: Optional[QuantSpec]) -> SymbolicArtifact:
    """Overlay (or strip, with ``spec=None``) codebook quantization.

    ``a`` must carry full-precision centers; symbols are untouched.
    """
    if a.quant is not None:
        raise QabbaError("artifact is already quantized")
    if spec is None:
        return a
    state = quantize_codebook(a.codebook, spec)
    cb = Codebook(state.centers(), a.codebook.counts)
    echo = a.params_echo and replace(a.params_echo, quant=spec)
    return replace(a, codebook=cb, quant=state, params_echo=echo)


def symbolize(s, cfg: PipelineConfig) -> SymbolicArtifact:
    """Compress, digitize and (optionally) quantize one series."""
    s = validate_series(s)
    pieces = compress_array(s, cfg.compression)
    symbols, cb, _ = digitize(pieces, cfg.digitization)
    plain = SymbolicArtifact((float(s.samples[0]),), symbols, cb, len(s), None,
                             replace(cfg, quant=None))
    return apply_quantization(plain, cfg.quant)


def reconstruct(a: SymbolicArtifact) -> Series:
    """Inverse digitization, carry rounding of lengths, inverse compression."""
    if a.N == 0 or len(a.initial_values) != 1:
        raise CorruptArtifact("artifact needs one initial value and at least one symbol")
    approx = inverse_digitize(a.symbols, a.codebook)
    return inverse_compress(a.initial_values[0], round_lengths_with_carry(approx))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QABBA_THREADS", "1")))
    except ValueError:
        return 1


def symbolize_multichannel(channels: Sequence, cfg: PipelineConfig, threads: Optional[int] = None) -> list[SymbolicArtifact]:
    """One independent artifact per channel, in channel order.

    ``threads`` (default: ``QABBA_THREADS`` or 1) bounds concurrency.
    """
    def one(item):
        i, ch = item
        try:
            return symbolize(ch, cfg)
        except QabbaError as exc:
            raise ChannelError(i, exc) from exc

    items = list(enumerate(channels))
    workers = threads or _threads()
    if workers <= 1 or len(items) <= 1:
        return [one(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, items))


def reconstruct_multichannel(artifacts: Sequence[SymbolicArtifact]) -> list[Series]:
    return [reconstruct(a) for a in artifacts]
