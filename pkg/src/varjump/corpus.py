"""Seeded random inputs shared by the sweeps and the tests."""

from __future__ import annotations

import math

import numpy as np

from .grid import Grid
from .martingale import VectorField
from .sphere import (SphereKernel, h1_atom, sin_kernel, cos2_kernel, twolevel_kernel,
                     enforce_cancellation)


def batch_seeds(seed: int, count: int) -> list:
    """Independent child seeds; child i does not depend on count."""
    return np.random.SeedSequence(int(seed)).spawn(int(count))


def random_series(rng: np.random.Generator, P: int, T: int) -> np.ndarray:
    """(P, T) rows mixing random walks, oscillations, sparse spikes and quarter-integer steps."""
    kind = rng.integers(0, 4, P)[:, None]
    walk = np.cumsum(rng.standard_normal((P, T)), axis=1)
    t = np.arange(T)[None, :]
    osc = np.sin(rng.uniform(0.2, 3.0, (P, 1)) * t + rng.uniform(0.0, 6.3, (P, 1))) * rng.uniform(0.5, 2.0, (P, 1))
    spk = rng.standard_normal((P, T)) * (rng.random((P, T)) < 0.2)
    # lattice values produce exact ties against lattice thresholds
    lat = np.round(4.0 * rng.standard_normal((P, T))) / 4.0
    return np.where(kind == 0, walk, np.where(kind == 1, osc, np.where(kind == 2, spk, lat)))


def ragged_series(rng: np.random.Generator, P: int, max_len: int, min_len: int = 1) -> list:
    lens = rng.integers(min_len, max_len + 1, P)
    full = random_series(rng, P, max_len)
    return [full[i, :lens[i]].copy() for i in range(P)]


def pad_rows(rows: list) -> np.ndarray:
    """Stack ragged series, repeating each last value; V_q and N_lam are unchanged."""
    T = max(len(r) for r in rows)
    out = np.empty((len(rows), T))
    for i, r in enumerate(rows):
        out[i, :len(r)] = r
        out[i, len(r):] = r[-1]
    return out


def random_vector_field(grid: Grid, rng: np.random.Generator, K: int = 3) -> VectorField:
    """Mostly small noise with a few tall bumps, so CZ selects cubes at several levels."""
    base = np.abs(rng.standard_normal((K,) + grid.shape)) * 0.2
    for _ in range(int(rng.integers(1, 6))):
        c = rng.integers(0, grid.N, grid.n)
        w = int(rng.integers(1, max(2, grid.N // 8)))
        sl = tuple(slice(int(ci), int(ci) + w) for ci in c)
        base[(slice(None),) + sl] += rng.uniform(1.0, 20.0) * rng.standard_normal((K, 1) + (1,) * (grid.n - 1)) ** 2
    return VectorField(grid, (0, K - 1), base)


def singular_kernel(M: int = 1024) -> SphereKernel:
    """Odd |sin|^(-1/2) type kernel, unbounded near 0 and pi but in L log L."""
    th = 2.0 * math.pi * np.arange(M) / M
    s = np.sin(th)
    v = np.zeros(M)
    nz = np.abs(s) > 1e-12
    v[nz] = np.sign(s[nz]) / np.sqrt(np.abs(s[nz]))
    return SphereKernel(2, v, None, True, "singular")


def random_bounded_kernel(rng: np.random.Generator, M: int = 1024, bound: float = 3.0) -> SphereKernel:
    v = rng.uniform(-bound, bound, M)
    k, _ = enforce_cancellation(SphereKernel(2, v, None, False, "random"))
    return k


def kernel_corpus(M: int = 1024) -> list:
    """Named mean-zero kernels for the decomposition checks."""
    out = [sin_kernel(M), cos2_kernel(M), singular_kernel(M)]
    out += [twolevel_kernel(a, math.pi / 2, M) for a in (1.5, 3.0, 10.0, 100.0)]
    out += [h1_atom(0.0, r * math.pi, M) for r in (0.25, 0.05, 0.01)]
    return out
