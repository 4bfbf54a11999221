"""Domain types and validation shared by every stage of the pipeline."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np


class QabbaError(ValueError):
    """Base class for domain errors raised by this package."""


class EmptySeries(QabbaError):
    pass


class NonFiniteSample(QabbaError):
    def __init__(self, index: int):
        super().__init__(f"non-finite sample at index {index}")
        self.index = index


class InvalidParameter(QabbaError):
    pass


class Method(str, enum.Enum):
    VQ = "vq"
    GA = "ga"


class Norm(str, enum.Enum):
    MINMAX = "minmax"
    STD = "std"


class QuantMode(str, enum.Enum):
    ASYMMETRIC = "asymmetric"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True, eq=False)
class Series:
    """A univariate signal held at 64-bit precision."""

    samples: np.ndarray
    name: Optional[str] = None

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return np.array_equal(self.samples, other.samples)

    __hash__ = None


@dataclass(frozen=True)
class Piece:
    len: int
    inc: float

    def __post_init__(self):
        if int(self.len) != self.len or self.len < 1:
            raise InvalidParameter(f"piece length must be a positive integer, got {self.len}")
        if not math.isfinite(self.inc):
            raise InvalidParameter("piece increment must be finite")


@dataclass(frozen=True)
class CompressionParams:
    tol: float = 0.1
    max_len: Optional[int] = None

    def __post_init__(self):
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise InvalidParameter(f"tol must be positive, got {self.tol}")
        if self.max_len is not None and self.max_len < 1:
            raise InvalidParameter(f"max_len must be >= 1, got {self.max_len}")


@dataclass(frozen=True)
class DigitizationParams:
    method: Method = Method.GA
    k: int = 10
    alpha: float = 0.4
    scl: float = 1.0
    norm: Norm = Norm.MINMAX
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "norm", Norm(self.norm))
        if self.method is Method.VQ and self.k < 1:
            raise InvalidParameter(f"k must be >= 1, got {self.k}")
        if self.method is Method.GA and not self.alpha > 0:
            raise InvalidParameter(f"alpha must be positive, got {self.alpha}")
        if not self.scl >= 0:
            raise InvalidParameter(f"scl must be nonnegative, got {self.scl}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameter("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class QuantSpec:
    """Bit-widths for the length and increment rows of the codebook."""

    bits_len: int = 8
    bits_inc: int = 12
    mode: QuantMode = QuantMode.ASYMMETRIC

    def __post_init__(self):
        object.__setattr__(self, "mode", QuantMode(self.mode))
        for name in ("bits_len", "bits_inc"):
            b = getattr(self, name)
            if int(b) != b or not 2 <= b <= 32:
                raise InvalidParameter(f"{name} must be an integer in [2, 32], got {b}")


@dataclass(frozen=True)
class PipelineConfig:
    compression: CompressionParams = field(default_factory=CompressionParams)
    digitization: DigitizationParams = field(default_factory=DigitizationParams)
    quant: Optional[QuantSpec] = field(default_factory=QuantSpec)


def as_series(s) -> Series:
    return s if isinstance(s, Series) else Series(s)


def validate_series(s) -> Series:
    """Check that ``s`` can be compressed; return it as a :class:`Series`.

    Raises:
        EmptySeries: fewer than two samples.
        NonFiniteSample: a NaN or infinite value; ``.index`` points at the first one.
    """
    s = as_series(s)
    if len(s) < 2:
        raise EmptySeries(f"series needs at least 2 samples, got {len(s)}")
    bad = np.flatnonzero(~np.isfinite(s.samples))
    if bad.size:
        raise NonFiniteSample(int(bad[0]))
    return s


def pieces_to_array(pieces: Sequence[Piece]) -> np.ndarray:
    """Stack pieces into an ``(N, 2)`` float array of (len, inc)."""
    if isinstance(pieces, np.ndarray):
        return np.asarray(pieces, dtype=np.float64).reshape(-1, 2)
    return np.array([(p.len, p.inc) for p in pieces], dtype=np.float64).reshape(-1, 2)


def array_to_pieces(arr: np.ndarray) -> list[Piece]:
    return [Piece(int(l), float(i)) for l, i in np.asarray(arr).reshape(-1, 2)]


def f32(x):
    """Round to the nearest float32 value, returned at 64-bit width."""
    return np.asarray(x, dtype=np.float32).astype(np.float64)


__all__ = [
    "QabbaError", "EmptySeries", "NonFiniteSample", "InvalidParameter",
    "Method", "Norm", "QuantMode", "Series", "Piece", "CompressionParams",
    "DigitizationParams", "QuantSpec", "PipelineConfig", "validate_series",
    "as_series", "pieces_to_array", "array_to_pieces", "replace",
]
