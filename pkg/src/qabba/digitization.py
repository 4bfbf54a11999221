"""Normalize pieces, cluster them into a codebook, and invert the mapping."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .core import DigitizationParams, Method, Norm, Piece, QabbaError, pieces_to_array

#: Greedy aggregation visits points in lexicographic order of
#: (scaled length, scaled increment); the sweep stops early once the first
#: coordinate is more than ``alpha`` past the seed.
GA_SORT_KEY = "lexicographic (length coordinate, then increment coordinate)"

MAX_LLOYD_ITER = 300


class EmptyInput(QabbaError):
    pass


class TooManyClusters(QabbaError):
    pass


class SymbolOutOfRange(QabbaError):
    pass


class ShapeMismatch(QabbaError):
    pass


@dataclass(frozen=True, eq=False)
class Codebook:
    """Cluster centers in original (len, inc) units plus member counts."""

    centers: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        c = np.array(self.centers, dtype=np.float64).reshape(-1, 2)
        n = np.array(self.counts, dtype=np.int64).reshape(-1)
        if c.shape[0] < 1:
            raise EmptyInput("codebook needs at least one center")
        if n.shape[0] != c.shape[0]:
            raise ShapeMismatch("one count per center required")
        if not np.all(np.isfinite(c)):
            raise QabbaError("codebook centers must be finite")
        c.setflags(write=False)
        n.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "counts", n)

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Codebook):
            return NotImplemented
        return np.array_equal(self.centers, other.centers) and np.array_equal(self.counts, other.counts)

    __hash__ = None


@dataclass(frozen=True)
class NormalizationState:
    sigma_len: float
    sigma_inc: float
    shift_len: float
    shift_inc: float
    scl: float
    kind: Norm


def _row_scaling(v: np.ndarray, kind: Norm) -> tuple[float, float]:
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return 1.0, lo
    if kind is Norm.MINMAX:
        return (hi - lo) / 2.0, (hi + lo) / 2.0
    sigma = float(np.std(v, ddof=1)) if v.shape[0] > 1 else 0.0
    return (sigma, 0.0) if sigma > 0 else (1.0, lo)


def normalize(pieces, scl: float, kind: Norm = Norm.MINMAX):
    """Scale pieces into clustering coordinates.

    Each point becomes ``(scl * (len - shift_len) / sigma_len,
    (inc - shift_inc) / sigma_inc)``. MinMax maps each row onto [-1, 1];
    StdDev divides by the sample standard deviation without centering.
    A row with a single distinct value uses ``sigma = 1`` and
    ``shift = value``.

    Returns:
        ``(points, state)`` with ``points`` of shape ``(N, 2)``.
    """
    arr = pieces_to_array(pieces)
    if arr.shape[0] == 0:
        raise EmptyInput("no pieces to normalize")
    kind = Norm(kind)
    sl, hl = _row_scaling(arr[:, 0], kind)
    si, hi = _row_scaling(arr[:, 1], kind)
    pts = np.column_stack([scl * (arr[:, 0] - hl) / sl, (arr[:, 1] - hi) / si])
    return pts, NormalizationState(sl, si, hl, hi, float(scl), kind)


def _nearest(points: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)  # first minimum: ties go to the lowest index
    return labels, d2[np.arange(points.shape[0]), labels]


def _kmeanspp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, 2))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        idx = int(rng.choice(n, p=d2 / total)) if total > 0 else int(rng.integers(n))
        centers[c] = points[idx]
        d2 = np.minimum(d2, ((points - centers[c]) ** 2).sum(axis=1))
    return centers


def _member_means(points: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    sums = np.zeros((k, points.shape[1]))
    np.add.at(sums, labels, points)
    return sums / np.maximum(counts, 1.0)[:, None]


def digitize_vq(points, k: int, seed: int = 0, max_iter: int = MAX_LLOYD_ITER):
    """k-means with k-means++ seeding.

    Lloyd iterations stop when no label changes or after ``max_iter`` rounds.
    An emptied cluster is re-seeded with the point farthest from its center.

    Raises:
        TooManyClusters: fewer than ``k`` distinct points.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise EmptyInput("no points to cluster")
    distinct = np.unique(pts, axis=0).shape[0]
    if not 1 <= k <= distinct:
        raise TooManyClusters(f"k={k} but only {distinct} distinct points")
    rng = np.random.default_rng(seed)
    centers = _kmeanspp(pts, k, rng)
    labels, _ = _nearest(pts, centers)
    for _ in range(max_iter):
        counts = np.bincount(labels, minlength=k)
        while np.any(counts == 0):
            empty = int(np.flatnonzero(counts == 0)[0])
            dist = ((pts - centers[labels]) ** 2).sum(axis=1)
            dist[counts[labels] < 2] = -1.0  # never empty another cluster
            far = int(np.argmax(dist))
            labels[far] = empty
            counts = np.bincount(labels, minlength=k)
        centers = _member_means(pts, labels, k)
        new, _ = _nearest(pts, centers)
        if np.array_equal(new, labels):
            break
        labels = new
    centers = _member_means(pts, labels, k)
    return labels.astype(np.int64), centers


def digitize_ga(points, alpha: float):
    """Greedy aggregation: every member lies within ``alpha`` of its group seed.

    Points are visited in :data:`GA_SORT_KEY` order. The resulting SSE is at
    most ``alpha**2 * (N - k)``.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise EmptyInput("no points to aggregate")
    if not alpha > 0:
        raise QabbaError("alpha must be positive")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    sorted_labels = _backend.ga_sweep(pts[order, 0], pts[order, 1], float(alpha))
    labels = np.empty_like(sorted_labels)
    labels[order] = sorted_labels
    k = int(sorted_labels.max()) + 1
    return labels, _member_means(pts, labels, k)


def assign_symbols(labels) -> np.ndarray:
    """Cluster index *is* the symbol; see :func:`render` for characters."""
    return np.asarray(labels, dtype=np.int64).reshape(-1).copy()


_ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def render(symbols) -> str:
    """Printable form: indices 0-51 map to ``a-z A-Z``; larger indices are
    written as two characters ``(q, r)`` of ``divmod(i - 52, 52)`` prefixed
    by ``~`` so the string stays unambiguous."""
    out = []
    for s in np.asarray(symbols).tolist():
        if s < 52:
            out.append(_ALPHABET[s])
        else:
            q, r = divmod(s - 52, 52)
            if q >= 52:
                raise SymbolOutOfRange(f"symbol {s} too large to render")
            out.append("~" + _ALPHABET[q] + _ALPHABET[r])
    return "".join(out)


def digitize(pieces, params: DigitizationParams):
    """Cluster pieces per ``params``.

    Returns:
        ``(symbols, codebook, state)``; codebook centers are plain means of the
        member pieces in original units, so ``scl`` only shapes membership.
    """
    arr = pieces_to_array(pieces)
    pts, state = normalize(arr, params.scl, params.norm)
    if params.method is Method.VQ:
        labels, _ = digitize_vq(pts, params.k, params.seed)
    else:
        labels, _ = digitize_ga(pts, params.alpha)
    k = int(labels.max()) + 1
    cb = Codebook(_member_means(arr, labels, k), np.bincount(labels, minlength=k))
    return assign_symbols(labels), cb, state


def inverse_digitize(symbols, codebook: Codebook) -> np.ndarray:
    """Replace every symbol by its center; returns ``(N, 2)`` real pieces."""
    sym = np.asarray(symbols, dtype=np.int64).reshape(-1)
    if sym.size and (sym.min() < 0 or sym.max() >= codebook.k):
        raise SymbolOutOfRange(f"symbols must lie in [0, {codebook.k})")
    return codebook.centers[sym].copy()


def _round_half_away(x: float) -> float:
    r = float(np.trunc(x))
    if abs(x - r) >= 0.5:
        r += 1.0 if x > 0 else -1.0
    return r


def round_lengths_with_carry(approx) -> np.ndarray:
    """Round real lengths so the running total tracks the real running total.

    The residual of each rounding is carried into the next length. Lengths
    that would round below 1 are clamped to 1 and the carry absorbs the
    difference. Increments pass through unchanged.
    """
    arr = np.array(approx, dtype=np.float64).reshape(-1, 2)
    carry = 0.0
    for j in range(arr.shape[0]):
        want = arr[j, 0] + carry
        got = max(_round_half_away(want), 1.0)
        carry = want - got
        arr[j, 0] = got
    return arr


def sse(points, labels, centers) -> float:
    """Sum of squared distances from each point to its assigned center."""
    pts = np.asarray(points, dtype=np.float64)
    lab = np.asarray(labels, dtype=np.int64).reshape(-1)
    c = np.asarray(centers, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] != lab.shape[0] or c.ndim != 2 or c.shape[1] != pts.shape[1]:
        raise ShapeMismatch("points, labels and centers disagree in shape")
    if lab.size and (lab.min() < 0 or lab.max() >= c.shape[0]):
        raise ShapeMismatch("label refers to a missing center")
    return float(((pts - c[lab]) ** 2).sum())
