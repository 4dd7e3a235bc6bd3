"""Dyadic conditional expectations, martingale differences, CZ decomposition.

Cubes at level l have side 2^l cells and index intervals [m 2^l, (m+1) 2^l)
on each axis.  The top level log2 N is the whole torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, SampledFunction, lp_norm
from .operators import LittlewoodPaleySmoother
from .variation import jump_rows


def top_level(grid: Grid) -> int:
    return int(round(math.log2(grid.N)))


@dataclass(frozen=True)
class DyadicLevel:
    level: int
    grid: Grid

    def __post_init__(self):
        if not 0 <= self.level <= top_level(self.grid):
            raise ValueError(f"level {self.level} outside [0, {top_level(self.grid)}]")

    @property
    def side(self) -> int:
        return 1 << self.level

    @property
    def cube_count(self) -> int:
        return (self.grid.N // self.side) ** self.grid.n


def _level(f, level) -> int:
    lv = level.level if isinstance(level, DyadicLevel) else int(level)
    DyadicLevel(lv, f.grid)
    return lv


def _block_mean(v: np.ndarray, b: int) -> np.ndarray:
    """Cube means at side b, broadcast back to full shape."""
    if b == 1:
        return v.copy()
    N = v.shape[0]
    c = N // b
    if v.ndim == 1:
        m = v.reshape(c, b).mean(axis=1)
        return np.repeat(m, b)
    m = v.reshape(c, b, c, b).mean(axis=(1, 3))
    return np.repeat(np.repeat(m, b, axis=0), b, axis=1)


def cube_means(v: np.ndarray, b: int) -> np.ndarray:
    """Cube means at side b, one entry per cube."""
    N = v.shape[0]
    c = N // b
    if v.ndim == 1:
        return v.reshape(c, b).mean(axis=1)
    return v.reshape(c, b, c, b).mean(axis=(1, 3))


def cond_expectation(f: SampledFunction, level) -> SampledFunction:
    lv = _level(f, level)
    return SampledFunction(f.grid, _block_mean(f.values, 1 << lv))


def martingale_diff(f: SampledFunction, level) -> SampledFunction:
    """E_l f - E_{l-1} f."""
    lv = _level(f, level)
    if lv == 0:
        raise ValueError("martingale difference needs level >= 1")
    return SampledFunction(f.grid, _block_mean(f.values, 1 << lv) - _block_mean(f.values, 1 << (lv - 1)))


def paired_scale(grid: Grid, level: int) -> float:
    """LP level k matched to cube side 2^l h: the phi_k plateau ends at 1/(2^l h)."""
    return 1.0 + level + math.log2(grid.h)


def phi_minus_e_square_function(f: SampledFunction, smoother: LittlewoodPaleySmoother | None = None,
                                levels=None) -> SampledFunction:
    """(sum_l |phi_{k(l)} * f - E_l f|^2)^(1/2) over the level window."""
    smoother = smoother or LittlewoodPaleySmoother()
    top = top_level(f.grid)
    lo, hi = (0, top) if levels is None else levels
    if lo < 0 or hi > top or lo > hi:
        raise ValueError(f"level window {levels} outside [0, {top}]")
    fhat = np.fft.fftn(f.values)
    acc = np.zeros(f.grid.shape)
    for lv in range(lo, hi + 1):
        m = smoother.multiplier(f.grid, paired_scale(f.grid, lv))
        d = np.real(np.fft.ifftn(fhat * m)) - _block_mean(f.values, 1 << lv)
        acc += d * d
    return SampledFunction(f.grid, np.sqrt(acc))


# Calderon-Zygmund -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VectorField:
    """h_k for k in k_range, stacked as an array of shape (K,) + grid.shape."""

    grid: Grid
    k_range: tuple
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        K = self.k_range[1] - self.k_range[0] + 1
        if v.shape != (K,) + self.grid.shape:
            raise ValueError(f"expected shape {(K,) + self.grid.shape}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vector field has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_functions(cls, fs, k0: int = 0) -> "VectorField":
        return cls(fs[0].grid, (k0, k0 + len(fs) - 1), np.stack([f.values for f in fs]))

    def norm_field(self) -> np.ndarray:
        return np.sqrt(np.sum(self.values ** 2, axis=0))

    def l1_l2(self) -> float:
        return float(np.sum(self.norm_field()) * self.grid.cell)

    def l2_l2_sq(self) -> float:
        return float(np.sum(self.values ** 2) * self.grid.cell)


@dataclass(frozen=True, eq=False)
class CZResult:
    alpha: float
    cubes: list          # (level, index tuple)
    good: VectorField
    atoms: dict          # (level, index) -> array (K,) + cube shape
    source: VectorField

    def cube_slices(self, cube) -> tuple:
        lv, idx = cube
        b = 1 << lv
        return tuple(slice(i * b, (i + 1) * b) for i in idx)

    def bad_field(self) -> np.ndarray:
        out = np.zeros(self.source.values.shape)
        for cube, a in self.atoms.items():
            out[(slice(None),) + self.cube_slices(cube)] += a
        return out

    def covered(self) -> np.ndarray:
        mask = np.zeros(self.source.grid.shape, dtype=bool)
        for cube in self.cubes:
            mask[self.cube_slices(cube)] = True
        return mask


def cz_decompose(h: VectorField, alpha: float) -> CZResult:
    """Stopping-time selection of maximal dyadic cubes with mean ||h||_l2 > alpha.

    Scans from the coarsest level to single cells; a cube is examined only if
    no ancestor was selected.  The whole torus must have mean <= alpha.
    """
    if not alpha > 0:
        raise ValueError(f"height alpha must be positive, got {alpha}")
    g = h.grid
    w = h.norm_field()
    top = top_level(g)
    if w.mean() > alpha:
        raise ValueError(f"alpha = {alpha} is below the global mean {w.mean():.6g}; no maximal cubes exist")
    blocked = np.zeros(g.shape, dtype=bool)
    cubes = []
    for lv in range(top - 1, -1, -1):
        b = 1 << lv
        means = cube_means(w, b)
        free = cube_means(blocked.astype(float), b) == 0
        hit = (means > alpha) & free
        for idx in zip(*np.nonzero(hit)):
            idx = tuple(int(i) for i in idx)
            cubes.append((lv, idx))
            blocked[tuple(slice(i * b, (i + 1) * b) for i in idx)] = True
    good = h.values.copy()
    atoms = {}
    for cube in cubes:
        lv, idx = cube
        b = 1 << lv
        sl = tuple(slice(i * b, (i + 1) * b) for i in idx)
        block = h.values[(slice(None),) + sl]
        avg = block.mean(axis=tuple(range(1, block.ndim)), keepdims=True)
        atoms[cube] = block - avg
        good[(slice(None),) + sl] = np.broadcast_to(avg, block.shape)
    return CZResult(alpha, cubes, VectorField(g, h.k_range, good), atoms, h)


def martingale_family(f: SampledFunction) -> np.ndarray:
    """(points, levels) array of E_l f(x), l = 0..top."""
    top = top_level(f.grid)
    return np.stack([_block_mean(f.values, 1 << lv).reshape(-1) for lv in range(top + 1)], axis=1)


def martingale_jump_ratio(f: SampledFunction, lam: float, p: float) -> float:
    """||lam sqrt(N_lam({E_l f}))||_p / ||f||_p."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if not 1 < p < math.inf:
        raise ValueError("need 1 < p < inf")
    nf = lp_norm(f, p)
    if nf == 0:
        return 0.0
    counts = jump_rows(martingale_family(f), lam)
    g = SampledFunction(f.grid, lam * np.sqrt(counts))
    return lp_norm(g, p) / nf
