"""Reconstruction-quality measures."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import _backend
from .core import EmptySeries, QabbaError, Series


class LengthMismatch(QabbaError):
    pass


def _arr(x) -> np.ndarray:
    return x.samples if isinstance(x, Series) else np.asarray(x, dtype=np.float64).reshape(-1)


def align(a, b, strict: bool = True) -> tuple[np.ndarray, np.ndarray, int]:
    """Return equal-length views of ``a`` and ``b`` plus the number of
    samples dropped. Strict mode refuses unequal lengths instead."""
    a, b = _arr(a), _arr(b)
    if a.shape[0] == b.shape[0]:
        return a, b, 0
    if strict:
        raise LengthMismatch(f"lengths differ: {a.shape[0]} vs {b.shape[0]}")
    n = min(a.shape[0], b.shape[0])
    return a[:n], b[:n], abs(a.shape[0] - b.shape[0])


def mse(a, b, strict: bool = True) -> float:
    """Mean of squared pointwise differences."""
    a, b, _ = align(a, b, strict)
    if a.shape[0] == 0:
        raise EmptySeries("mse of empty series")
    d = a - b
    return float(np.dot(d, d) / d.shape[0])


def euclidean(a, b, strict: bool = True) -> float:
    a, b, _ = align(a, b, strict)
    d = a - b
    return math.sqrt(float(np.dot(d, d)))


def dtw(a, b) -> float:
    """Unconstrained DTW: squared local distance, square root of the total."""
    a, b = _arr(a), _arr(b)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise EmptySeries("dtw needs nonempty series")
    return math.sqrt(_backend.dtw_sq(np.ascontiguousarray(a), np.ascontiguousarray(b)))


def differenced(metric: Callable, a, b, **kw) -> float:
    """Apply ``metric`` to the first differences of both series."""
    a, b = _arr(a), _arr(b)
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise EmptySeries("differencing needs at least 2 samples")
    return metric(np.diff(a), np.diff(b), **kw)


@dataclass(frozen=True)
class MetricReport:
    mse: float
    rmse: float
    euclidean: float
    dtw: float
    euclidean_diff: float
    dtw_diff: float
    truncated: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def report(original, recon, strict: bool = True) -> MetricReport:
    """All measures at once; in lenient mode the longer series is truncated
    (DTW still sees both in full) and ``truncated`` counts the dropped samples."""
    a, b, cut = align(original, recon, strict)
    m = mse(a, b)
    return MetricReport(
        mse=m,
        rmse=math.sqrt(m),
        euclidean=euclidean(a, b),
        dtw=dtw(original, recon),
        euclidean_diff=differenced(euclidean, a, b),
        dtw_diff=differenced(dtw, original, recon),
        truncated=cut,
    )
