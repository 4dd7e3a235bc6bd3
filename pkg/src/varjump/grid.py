"""Periodic power-of-two grids, sampled functions, FFT convolution, rotation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._backend import impl


def _is_pow2(N: int) -> bool:
    return N >= 1 and (N & (N - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """The torus [-L, L)^n sampled at x_i = -L + i h, h = 2L/N.

    The origin sits at index N // 2 on every axis.
    """

    n: int
    N: int
    L: float = 1.0

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.n}")
        if not isinstance(self.N, (int, np.integer)) or self.N < 8 or not _is_pow2(int(self.N)):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"half-width L must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N ** self.n

    @property
    def cell(self) -> float:
        """Cell measure h^n."""
        return self.h ** self.n

    @property
    def r_cut(self) -> float:
        """Kernel truncation radius L/2; keeps convolutions free of wraparound."""
        return self.L / 2.0

    def coord(self, index):
        return -self.L + np.asarray(index) * self.h

    def index(self, x):
        """Nearest grid index of coordinate x (periodic)."""
        return np.rint((np.asarray(x) + self.L) / self.h).astype(np.int64) % self.N

    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    def mesh(self) -> tuple:
        ax = self.axis()
        return tuple(np.meshgrid(*([ax] * self.n), indexing="ij"))

    def offsets(self) -> tuple:
        """Offset coordinates y (origin at index N//2), the layout used for kernels."""
        return self.mesh()

    def frequencies(self) -> tuple:
        """Discrete frequencies m/(2L) in FFT order, one array per axis."""
        fr = np.fft.fftfreq(self.N, d=self.h)
        return tuple(np.meshgrid(*([fr] * self.n), indexing="ij"))

    def freq_norm(self) -> np.ndarray:
        fr = self.frequencies()
        return np.sqrt(sum(f * f for f in fr))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Real samples of a function on a Grid, stored as an n-dimensional array."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {v.size}")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("sampled function has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, func: Callable) -> "SampledFunction":
        return cls(grid, func(*grid.mesh()))

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "SampledFunction":
        return cls(grid, np.full(grid.shape, float(c)))

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __add__(self, other):
        _same_grid(self, other)
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return SampledFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        return SampledFunction(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return SampledFunction(self.grid, -self.values)


def _same_grid(f, g):
    if f.grid != g.grid:
        raise ValueError(f"grid mismatch: {f.grid} vs {g.grid}")


@dataclass(frozen=True)
class ScaleGrid:
    """Scales 2^(j + i/s) for j_min <= j <= j_max, 0 <= i < s, closed by 2^(j_max+1)."""

    j_min: int
    j_max: int
    samples_per_octave: int = 1

    def __post_init__(self):
        if self.j_max < self.j_min:
            raise ValueError("j_max must be >= j_min")
        if self.samples_per_octave < 1:
            raise ValueError("samples_per_octave must be >= 1")

    @property
    def exponents(self) -> np.ndarray:
        s = self.samples_per_octave
        e = [j + i / s for j in range(self.j_min, self.j_max + 1) for i in range(s)]
        e.append(self.j_max + 1)
        return np.array(e)

    @property
    def scales(self) -> np.ndarray:
        return np.exp2(self.exponents)

    @property
    def dyadic_index(self) -> np.ndarray:
        """Positions of the scales 2^j (the i = 0 subsequence plus the closing scale)."""
        return np.arange(0, len(self), self.samples_per_octave)

    def octave_bounds(self, j: int) -> tuple:
        """Index range [lo, hi] of samples in the closed octave [2^j, 2^(j+1)]."""
        if not self.j_min <= j <= self.j_max:
            raise ValueError(f"octave {j} outside [{self.j_min}, {self.j_max}]")
        lo = (j - self.j_min) * self.samples_per_octave
        return lo, lo + self.samples_per_octave

    def __len__(self):
        return (self.j_max - self.j_min + 1) * self.samples_per_octave + 1


def lp_norm(f: SampledFunction, p: float) -> float:
    """Riemann-sum L^p norm; p = inf gives the max modulus."""
    if p == math.inf or p == "inf":
        return float(np.max(np.abs(f.values)))
    p = float(p)
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    if p == 2:
        return float(math.sqrt(np.sum(a * a) * f.grid.cell))
    return float((np.sum(a ** p) * f.grid.cell) ** (1.0 / p))


def kernel_spectrum(k: np.ndarray, grid: Grid) -> np.ndarray:
    """FFT of a centred kernel density, scaled by h^n so products realize convolution."""
    return np.fft.fftn(np.fft.ifftshift(k)) * grid.cell


def convolve_spectrum(f: SampledFunction, khat: np.ndarray) -> SampledFunction:
    return SampledFunction(f.grid, np.real(np.fft.ifftn(np.fft.fftn(f.values) * khat)))


def convolve(f: SampledFunction, k: SampledFunction) -> SampledFunction:
    """Periodic convolution with k read as a density centred at index N//2."""
    _same_grid(f, k)
    return convolve_spectrum(f, kernel_spectrum(k.values, k.grid))


def rotate(f: SampledFunction, angle: float) -> SampledFunction:
    """(R f)(x) = f(sigma x) for the rotation sigma by `angle`, bilinear, periodic."""
    if f.grid.n != 2:
        raise ValueError("rotate needs a 2-D grid")
    if angle == 0:
        return f
    c, s = math.cos(angle), math.sin(angle)
    return SampledFunction(f.grid, impl.rotate_bilinear(np.ascontiguousarray(f.values), c, s))


def band_limited(grid: Grid, rng: np.random.Generator, fmax: float, radius: float | None = None):
    """Random real trigonometric polynomial with frequencies |xi| <= fmax.

    Coefficients are drawn in a fixed order over the lattice m/(2L), so the
    same seed gives the same continuous function on every grid resolving fmax.
    With `radius` the result is tapered by exp(-|x|^2/radius^2).  The output is
    normalized to unit RMS on the grid.
    """
    step = 1.0 / (2.0 * grid.L)
    mmax = int(math.floor(fmax / step))
    if mmax >= grid.N // 2:
        raise ValueError(f"fmax={fmax} is not resolved by N={grid.N}")
    ms = np.arange(-mmax, mmax + 1)
    lat = np.meshgrid(*([ms] * grid.n), indexing="ij")
    keep = np.sqrt(sum(m * m for m in lat)) * step <= fmax
    coef = np.zeros(keep.shape, dtype=complex)
    coef[keep] = rng.standard_normal(int(keep.sum())) + 1j * rng.standard_normal(int(keep.sum()))
    # x_i = -L + i h, so mode m picks up the phase (-1)^m relative to index space
    coef *= (-1.0) ** (sum(lat) % 2)
    spec = np.zeros(grid.shape, dtype=complex)
    spec[np.ix_(*([ms % grid.N] * grid.n))] = coef
    v = np.real(np.fft.ifftn(spec)) * grid.size
    if radius is not None:
        r2 = sum(x * x for x in grid.mesh())
        v = v * np.exp(-r2 / (radius * radius))
    scale = np.sqrt(np.mean(v * v))
    return SampledFunction(grid, v / scale if scale > 0 else v)
