"""Pure-Python hot loops. ``_ckernels.pyx`` mirrors these operation for
operation so both backends give bit-identical results."""
import math

import numpy as np

_EPS = 2.220446049250313e-16


def segment_sse(t, start, end):
    """Squared deviation of interior samples from the chord start->end.

    Endpoints are skipped: they lie on the chord by construction and
    evaluating them in floating point can only add rounding noise.
    """
    ts = t[start]
    d = t[end] - ts
    width = end - start
    acc = 0.0
    for i in range(start + 1, end):
        r = ts + d * (i - start) / width - t[i]
        acc += r * r
    return acc


def compress_breakpoints(t, tol, max_len):
    """Greedy scan returning breakpoint indices ``[0, i_1, ..., n-1]``.

    ``max_len <= 0`` means no cap. Candidate ends are screened with running
    sums; candidates within rounding distance of the bound are re-decided by
    :func:`segment_sse` so the result agrees with the direct criterion.
    """
    t = [float(v) for v in t]
    n = len(t)
    tol2 = tol * tol
    bps = [0]
    start = 0
    while start < n - 1:
        end = start + 1
        ts = t[start]
        sy2 = 0.0
        sxy = 0.0
        while end + 1 <= n - 1:
            cand = end + 1
            width = cand - start
            if max_len > 0 and width > max_len:
                break
            x = float(end - start)
            y = t[end] - ts
            sy2 += y * y
            sxy += x * y
            b = (t[cand] - ts) / width
            m = width - 1.0
            sx2 = m * (m + 1.0) * (2.0 * m + 1.0) / 6.0
            err = b * b * sx2 - 2.0 * b * sxy + sy2
            bound = m * tol2
            mag = b * b * sx2 + 2.0 * abs(b * sxy) + sy2
            margin = 8.0 * (width + 4.0) * _EPS * mag
            if err < bound - margin:
                ok = True
            elif err > bound + margin:
                ok = False
            else:
                ok = segment_sse(t, start, cand) <= bound
            if not ok:
                break
            end = cand
        bps.append(end)
        start = end
    return np.array(bps, dtype=np.int64)


def dtw_sq(a, b):
    """DTW cost with squared local distance (no final square root)."""
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    m = len(b)
    inf = math.inf
    prev = [inf] * (m + 1)
    prev[0] = 0.0
    for ai in a:
        cur = [inf] * (m + 1)
        for j in range(1, m + 1):
            d = ai - b[j - 1]
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = d * d + best
        prev = cur
    return prev[m]


def ga_sweep(xs, ys, alpha):
    """Greedy aggregation over points already sorted by ``xs``.

    Returns a group label per (sorted) point; groups are numbered in seed order.
    """
    n = len(xs)
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    a2 = alpha * alpha
    labels = [-1] * n
    g = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        labels[i] = g
        sx = xs[i]
        sy = ys[i]
        for j in range(i + 1, n):
            dx = xs[j] - sx
            if dx > alpha:
                break
            if labels[j] >= 0:
                continue
            dy = ys[j] - sy
            if dx * dx + dy * dy <= a2:
                labels[j] = g
        g += 1
    return np.array(labels, dtype=np.int64)
