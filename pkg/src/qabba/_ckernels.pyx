# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the loops in ``_pykernels``; same arithmetic order."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()

cdef double _EPS = 2.220446049250313e-16


cdef double _segment_sse(const double[::1] t, Py_ssize_t start, Py_ssize_t end) noexcept nogil:
    cdef double ts = t[start]
    cdef double d = t[end] - ts
    cdef double width = <double>(end - start)
    cdef double acc = 0.0
    cdef double r
    cdef Py_ssize_t i
    for i in range(start + 1, end):
        r = ts + d * <double>(i - start) / width - t[i]
        acc += r * r
    return acc


def segment_sse(t, Py_ssize_t start, Py_ssize_t end):
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    return _segment_sse(tv, start, end)


def compress_breakpoints(t, double tol, long max_len):
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t n = tv.shape[0]
    cdef double tol2 = tol * tol
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t nb = 0
    cdef Py_ssize_t start = 0, end, cand
    cdef long width
    cdef double ts, sy2, sxy, x, y, b, m, sx2, err, bound, mag, margin
    cdef bint ok
    out[nb] = 0
    nb += 1
    with nogil:
        while start < n - 1:
            end = start + 1
            ts = tv[start]
            sy2 = 0.0
            sxy = 0.0
            while end + 1 <= n - 1:
                cand = end + 1
                width = cand - start
                if max_len > 0 and width > max_len:
                    break
                x = <double>(end - start)
                y = tv[end] - ts
                sy2 += y * y
                sxy += x * y
                b = (tv[cand] - ts) / <double>width
                m = <double>width - 1.0
                sx2 = m * (m + 1.0) * (2.0 * m + 1.0) / 6.0
                err = b * b * sx2 - 2.0 * b * sxy + sy2
                bound = m * tol2
                mag = b * b * sx2 + 2.0 * fabs(b * sxy) + sy2
                margin = 8.0 * (<double>width + 4.0) * _EPS * mag
                if err < bound - margin:
                    ok = True
                elif err > bound + margin:
                    ok = False
                else:
                    ok = _segment_sse(tv, start, cand) <= bound
                if not ok:
                    break
                end = cand
            out[nb] = end
            nb += 1
            start = end
    return out[:nb].copy()


def dtw_sq(a, b):
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0], m = bv.shape[0], i, j
    cdef double[::1] prev = np.full(m + 1, np.inf)
    cdef double[::1] cur = np.empty(m + 1)
    cdef double[::1] tmp
    cdef double d, best, ai
    prev[0] = 0.0
    with nogil:
        for i in range(n):
            ai = av[i]
            cur[0] = INFINITY
            for j in range(1, m + 1):
                d = ai - bv[j - 1]
                best = prev[j - 1]
                if prev[j] < best:
                    best = prev[j]
                if cur[j - 1] < best:
                    best = cur[j - 1]
                cur[j] = d * d + best
            tmp = prev
            prev = cur
            cur = tmp
    return prev[m]


def ga_sweep(xs, ys, double alpha):
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i, j
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t g = 0
    cdef double a2 = alpha * alpha, sx, sy, dx, dy
    with nogil:
        for i in range(n):
            if labels[i] >= 0:
                continue
            labels[i] = g
            sx = xv[i]
            sy = yv[i]
            for j in range(i + 1, n):
                dx = xv[j] - sx
                if dx > alpha:
                    break
                if labels[j] >= 0:
                    continue
                dy = yv[j] - sy
                if dx * dx + dy * dy <= a2:
                    labels[j] = g
            g += 1
    return labels
