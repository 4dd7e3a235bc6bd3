"""Pure numpy versions of the compiled kernels in _core.pyx.

Signatures and results match the compiled module; loops run over the time
axis and are vectorized across rows.
"""

import numpy as np


def _powq(x, q):
    if q == 2.0:
        return x * x
    if q == 1.0:
        return x
    return x ** q


def vq_rows(a, q, powered_first=True):
    a = np.ascontiguousarray(a, dtype=np.float64)
    P, T = a.shape
    best = np.empty((P, T))
    for i in range(T):
        b = _powq(np.abs(a[:, i]), q) if powered_first else np.abs(a[:, i])
        if i:
            cand = best[:, :i] + _powq(np.abs(a[:, i:i + 1] - a[:, :i]), q)
            b = np.maximum(b, cand.max(axis=1))
        best[:, i] = b
    if T == 0:
        return np.zeros(P)
    return best.max(axis=1)


def block_rows(a, lo, hi):
    a = np.ascontiguousarray(a, dtype=np.float64)
    P = a.shape[0]
    if hi <= lo:
        return np.zeros(P)
    seg = a[:, lo:hi]
    best = np.zeros((P, hi - lo))
    for i in range(1, hi - lo):
        d = seg[:, i:i + 1] - seg[:, :i]
        best[:, i] = np.maximum(0.0, (best[:, :i] + d * d).max(axis=1))
    return best.max(axis=1)


def jump_rows(a, lam):
    a = np.ascontiguousarray(a, dtype=np.float64)
    P, T = a.shape
    cnt = np.zeros(P, dtype=np.int64)
    if T == 0:
        return cnt
    lo = a[:, 0].copy()
    hi = lo.copy()
    for i in range(1, T):
        v = a[:, i]
        np.minimum(lo, v, out=lo)
        np.maximum(hi, v, out=hi)
        hit = hi - lo > lam
        cnt += hit
        lo[hit] = v[hit]
        hi[hit] = v[hit]
    return cnt


def rotate_bilinear(f, c, s):
    f = np.ascontiguousarray(f, dtype=np.float64)
    N = f.shape[0]
    half = N // 2
    u = np.arange(N, dtype=np.float64) - half
    U1, U2 = np.meshgrid(u, u, indexing="ij")
    p1 = c * U1 - s * U2 + half
    p2 = s * U1 + c * U2 + half
    i0 = np.floor(p1)
    j0 = np.floor(p2)
    fa = p1 - i0
    fb = p2 - j0
    i0 = i0.astype(np.int64) % N
    j0 = j0.astype(np.int64) % N
    i1 = (i0 + 1) % N
    j1 = (j0 + 1) % N
    return ((1 - fa) * (1 - fb) * f[i0, j0] + fa * (1 - fb) * f[i1, j0]
            + (1 - fa) * fb * f[i0, j1] + fa * fb * f[i1, j1])


def jump_rows_each(a, lam):
    a = np.ascontiguousarray(a, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    P, T = a.shape
    cnt = np.zeros(P, dtype=np.int64)
    if T == 0:
        return cnt
    lo = a[:, 0].copy()
    hi = lo.copy()
    for i in range(1, T):
        v = a[:, i]
        np.minimum(lo, v, out=lo)
        np.maximum(hi, v, out=hi)
        hit = hi - lo > lam
        cnt += hit
        lo[hit] = v[hit]
        hi[hit] = v[hit]
    return cnt
