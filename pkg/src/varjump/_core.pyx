# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: variation DPs, greedy jump counts, bilinear rotation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, floor, sqrt

cnp.import_array()


cdef inline double _powq(double x, double q) noexcept nogil:
    cdef double r
    cdef int k
    if q == 2.0:
        return x * x
    if q == 1.0:
        return x
    if q == floor(q) and q <= 8.0:
        r = x
        for k in range(1, <int>q):
            r *= x
        return r
    return pow(x, q)


def vq_rows(const double[:, ::1] a, double q, bint powered_first=True):
    """Return max_i best[i] per row (the q-th power of V_q when powered_first)."""
    cdef Py_ssize_t P = a.shape[0], T = a.shape[1]
    cdef Py_ssize_t p, i, j
    cdef double cand, b, top, x
    out = np.zeros(P, dtype=np.float64)
    cdef double[::1] res = out
    cdef double[::1] best = np.empty(max(T, 1), dtype=np.float64)
    with nogil:
        for p in range(P):
            top = 0.0
            for i in range(T):
                x = a[p, i]
                if powered_first:
                    b = _powq(fabs(x), q)
                else:
                    b = fabs(x)
                for j in range(i):
                    cand = best[j] + _powq(fabs(x - a[p, j]), q)
                    if cand > b:
                        b = cand
                best[i] = b
                if b > top:
                    top = b
            res[p] = top
    return out


def block_rows(const double[:, ::1] a, Py_ssize_t lo, Py_ssize_t hi):
    """Squared short 2-variation of columns lo..hi-1 per row (DP started at 0)."""
    cdef Py_ssize_t P = a.shape[0]
    cdef Py_ssize_t p, i, j
    cdef double cand, b, top, d
    out = np.zeros(P, dtype=np.float64)
    cdef double[::1] res = out
    cdef double[::1] best = np.empty(max(hi - lo, 1), dtype=np.float64)
    with nogil:
        for p in range(P):
            top = 0.0
            for i in range(lo, hi):
                b = 0.0
                for j in range(lo, i):
                    d = a[p, i] - a[p, j]
                    cand = best[j - lo] + d * d
                    if cand > b:
                        b = cand
                best[i - lo] = b
                if b > top:
                    top = b
            res[p] = top
    return out


def jump_rows(const double[:, ::1] a, double lam):
    """Greedy lambda-jump count per row, tracking the range since the anchor."""
    cdef Py_ssize_t P = a.shape[0], T = a.shape[1]
    cdef Py_ssize_t p, i
    cdef double lo, hi, v
    cdef long cnt
    out = np.zeros(P, dtype=np.int64)
    cdef cnp.int64_t[::1] res = out
    with nogil:
        for p in range(P):
            cnt = 0
            if T > 0:
                lo = a[p, 0]
                hi = lo
                for i in range(1, T):
                    v = a[p, i]
                    if v < lo:
                        lo = v
                    if v > hi:
                        hi = v
                    if hi - lo > lam:
                        cnt += 1
                        lo = v
                        hi = v
            res[p] = cnt
    return out


def rotate_bilinear(const double[:, ::1] f, double c, double s):
    """Sample f at the rotated index (c u1 - s u2, s u1 + c u2) about N//2."""
    cdef Py_ssize_t N = f.shape[0]
    cdef Py_ssize_t half = N // 2
    cdef Py_ssize_t i, j, i0, j0, i1, j1
    cdef double u1, u2, p1, p2, fa, fb
    out = np.empty((N, N), dtype=np.float64)
    cdef double[:, ::1] g = out
    with nogil:
        for i in range(N):
            u1 = <double>(i - half)
            for j in range(N):
                u2 = <double>(j - half)
                p1 = c * u1 - s * u2 + half
                p2 = s * u1 + c * u2 + half
                fa = floor(p1)
                fb = floor(p2)
                i0 = <Py_ssize_t>fa
                j0 = <Py_ssize_t>fb
                fa = p1 - fa
                fb = p2 - fb
                i0 = i0 % N
                if i0 < 0:
                    i0 += N
                j0 = j0 % N
                if j0 < 0:
                    j0 += N
                i1 = i0 + 1
                if i1 == N:
                    i1 = 0
                j1 = j0 + 1
                if j1 == N:
                    j1 = 0
                g[i, j] = ((1.0 - fa) * (1.0 - fb) * f[i0, j0] + fa * (1.0 - fb) * f[i1, j0]
                           + (1.0 - fa) * fb * f[i0, j1] + fa * fb * f[i1, j1])
    return out


def jump_rows_each(const double[:, ::1] a, const double[::1] lam):
    """Greedy jump count of row p at threshold lam[p]."""
    cdef Py_ssize_t P = a.shape[0], T = a.shape[1]
    cdef Py_ssize_t p, i
    cdef double lo, hi, v, th
    cdef long cnt
    out = np.zeros(P, dtype=np.int64)
    cdef cnp.int64_t[::1] res = out
    with nogil:
        for p in range(P):
            cnt = 0
            th = lam[p]
            if T > 0:
                lo = a[p, 0]
                hi = lo
                for i in range(1, T):
                    v = a[p, i]
                    if v < lo:
                        lo = v
                    if v > hi:
                        hi = v
                    if hi - lo > th:
                        cnt += 1
                        lo = v
                        hi = v
            res[p] = cnt
    return out
