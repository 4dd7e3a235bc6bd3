"""Truncated singular integrals, rough averages, annulus pieces, LP smoothing.

Annulus convention on the grid: nu_j lives on 2^j < |y| <= 2^(j+1), cut at
R_cut = L/2, and T_eps on eps < |y| <= R_cut.  With these half-open shells
T_{2^k} = sum_{j >= k} nu_j holds exactly on the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, SampledFunction, ScaleGrid, kernel_spectrum, rotate, _same_grid
from .sphere import SphereKernel, split_odd_even
from .variation import ScaleFamily

KINDS = ("truncated_singular", "averaging", "hilbert_1d")


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    kind: str
    kernel: SphereKernel
    grid: Grid
    scale_grid: ScaleGrid

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kernel.n != self.grid.n:
            raise ValueError("kernel and grid dimensions differ")
        if self.kind == "hilbert_1d":
            if self.grid.n != 1 or not np.allclose(self.kernel.values, [1 / math.pi, -1 / math.pi], rtol=0, atol=1e-15):
                raise ValueError("hilbert_1d needs n = 1 and Omega(+-1) = +-1/pi")
        if self.kind == "truncated_singular" and not self.kernel.cancellation_enforced:
            raise ValueError("truncated_singular needs a cancelled kernel")

    @property
    def r_cut(self) -> float:
        return self.grid.r_cut

    def octaves(self) -> tuple:
        """(j_lo, j_hi): shells resolvable (2^j >= 2h) up to the first reaching R_cut."""
        g = self.grid
        j_lo = math.ceil(math.log2(2 * g.h) - 1e-12)
        j_hi = math.ceil(math.log2(g.r_cut) - 1e-12) - 1
        return j_lo, j_hi


# densities ------------------------------------------------------------------

def _radius(y):
    return np.sqrt(sum(c * c for c in y))


def shell_density(kernel: SphereKernel, grid: Grid, lo: float, hi: float,
                  supersample: int = 1) -> np.ndarray:
    """Omega(y')|y|^-n on lo < |y| <= hi at the grid offsets.

    With supersample S > 1 each cell value is the mean over S^n sub-points,
    which smooths the hard cutoff at lo and hi.
    """
    n = grid.n
    if supersample <= 1:
        y = grid.offsets()
        r = _radius(y)
        keep = (r > lo) & (r <= hi)
        out = np.zeros(grid.shape)
        out[keep] = kernel.evaluate_vec(*(c[keep] for c in y)) / r[keep] ** n
        return out
    S = int(supersample)
    sub = (np.arange(S) + 0.5) / S - 0.5
    ax = grid.axis()
    out = np.zeros(grid.shape)
    if n == 1:
        for d in sub:
            y = ax + d * grid.h
            r = np.abs(y)
            keep = (r > lo) & (r <= hi)
            out[keep] += kernel.evaluate_vec(y[keep]) / r[keep]
        return out / S
    # only rows whose cells can meet the shell
    rows = np.flatnonzero(np.abs(ax) <= hi + grid.h)
    cols = rows
    Y1, Y2 = np.meshgrid(ax[rows], ax[cols], indexing="ij")
    acc = np.zeros(Y1.shape)
    for d1 in sub:
        for d2 in sub:
            y1 = Y1 + d1 * grid.h
            y2 = Y2 + d2 * grid.h
            r2 = y1 * y1 + y2 * y2
            keep = (r2 > lo * lo) & (r2 <= hi * hi)
            acc[keep] += kernel.evaluate_vec(y1[keep], y2[keep]) / r2[keep]
    out[np.ix_(rows, cols)] = acc / (S * S)
    return out


def ball_density(kernel: SphereKernel, grid: Grid, t: float) -> np.ndarray:
    """t^-n Omega(y') on |y| < t; the origin cell carries the spherical mean."""
    y = grid.offsets()
    r = _radius(y)
    keep = (r < t) & (r > 0)
    out = np.zeros(grid.shape)
    out[keep] = kernel.evaluate_vec(*(c[keep] for c in y))
    out[(grid.N // 2,) * grid.n] = kernel.mean()
    return out / t ** grid.n


def _apply(f: SampledFunction, dens: np.ndarray, fhat=None) -> SampledFunction:
    fhat = np.fft.fftn(f.values) if fhat is None else fhat
    return SampledFunction(f.grid, np.real(np.fft.ifftn(fhat * kernel_spectrum(dens, f.grid))))


def _check_grid(spec, f):
    if f.grid != spec.grid:
        raise ValueError("function and operator grids differ")


def truncated_density(spec: OperatorSpec, eps: float) -> np.ndarray:
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if spec.kind == "averaging":
        raise ValueError("truncation needs a singular-integral spec")
    if eps >= spec.r_cut:
        return np.zeros(spec.grid.shape)
    return shell_density(spec.kernel, spec.grid, eps, spec.r_cut)


def apply_truncated(spec: OperatorSpec, f: SampledFunction, eps: float) -> SampledFunction:
    """T_eps f: grid quadrature over eps < |y| <= R_cut, one FFT convolution."""
    _check_grid(spec, f)
    dens = truncated_density(spec, eps)
    if eps >= spec.r_cut:
        return SampledFunction.constant(f.grid, 0.0)
    return _apply(f, dens)


def averaging_density(spec: OperatorSpec, t: float) -> np.ndarray:
    if spec.kind != "averaging":
        raise ValueError("averaging needs an averaging spec")
    if t < 2 * spec.grid.h:
        raise ValueError(f"t = {t} is below the resolvability floor 2h = {2 * spec.grid.h}")
    return ball_density(spec.kernel, spec.grid, t)


def apply_averaging(spec: OperatorSpec, f: SampledFunction, t: float) -> SampledFunction:
    """M_t f = t^-n sum_{|y| < t} Omega(y') f(x - y) h^n."""
    _check_grid(spec, f)
    return _apply(f, averaging_density(spec, t))


def family_apply(spec: OperatorSpec, f: SampledFunction) -> ScaleFamily:
    """A_t f at every scale of spec.scale_grid, as a (points, scales) family."""
    _check_grid(spec, f)
    fhat = np.fft.fftn(f.values)
    cols = []
    for t in spec.scale_grid.scales:
        if spec.kind == "averaging":
            dens = averaging_density(spec, t)
        else:
            dens = truncated_density(spec, t)
        if not dens.any():
            cols.append(np.zeros(f.grid.size))
            continue
        cols.append(_apply(f, dens, fhat).flat)
    return ScaleFamily(spec.scale_grid, np.stack(cols, axis=1))


@dataclass(frozen=True, eq=False)
class AnnulusMeasure:
    """Omega(y')|y|^-n on the octave 2^j < |y| <= 2^(j+1)."""

    kernel: SphereKernel
    j: int
    piece: int | None = None

    @property
    def radii(self) -> tuple:
        return 2.0 ** self.j, 2.0 ** (self.j + 1)

    def density(self, grid: Grid) -> np.ndarray:
        lo, hi = self.radii
        return shell_density(self.kernel, grid, lo, min(hi, grid.r_cut))

    def spectrum(self, grid: Grid) -> np.ndarray:
        return kernel_spectrum(self.density(grid), grid)

    def total_variation(self, grid: Grid) -> float:
        return float(np.sum(np.abs(self.density(grid))) * grid.cell)


def annulus_convolve(measure: AnnulusMeasure, f: SampledFunction) -> SampledFunction:
    return _apply(f, measure.density(f.grid))


# Littlewood-Paley ------------------------------------------------------------

def smoothstep_profile(r):
    """1 on r <= 2, 0 on r >= 4, quintic (C^2) smoothstep in between."""
    r = np.asarray(r, dtype=float)
    s = np.clip((r - 2.0) / 2.0, 0.0, 1.0)
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)


@dataclass(frozen=True)
class LittlewoodPaleySmoother:
    """phi_k with multiplier phi_hat(2^k xi)."""

    def multiplier(self, grid: Grid, k: float) -> np.ndarray:
        return smoothstep_profile(2.0 ** k * grid.freq_norm())

    def apply(self, f: SampledFunction, k: float) -> SampledFunction:
        m = self.multiplier(f.grid, k)
        return SampledFunction(f.grid, np.real(np.fft.ifftn(np.fft.fftn(f.values) * m)))


def covers_cutoff(spec: OperatorSpec, j_hi: int) -> bool:
    """True when shells up to j_hi reach R_cut, so no annulus mass is left out."""
    return 2.0 ** (j_hi + 1) >= spec.r_cut


def lp_decomposition_residual(spec: OperatorSpec, f: SampledFunction, k: int, j_window) -> float:
    """Relative sup residual of T_{2^k} f against T1 - T2 + T3 built from the window.

    T1 = phi_k * sum_j nu_j * f, T2 = phi_k * sum_{l<0} nu_{k+l} * f,
    T3 = sum_{s>=0} (delta - phi_k) * nu_{k+s} * f, all j in [j_lo, j_hi].
    T_{2^k} itself is computed from its own truncated density.
    """
    if spec.kind == "averaging":
        raise ValueError("decomposition needs a singular-integral spec")
    _check_grid(spec, f)
    j_lo, j_hi = j_window
    if not j_lo <= k <= j_hi:
        raise ValueError(f"k = {k} outside window [{j_lo}, {j_hi}]")
    if 2.0 ** j_lo < 2 * spec.grid.h * (1 - 1e-12):
        raise ValueError("window reaches below the 2h floor")
    fhat = np.fft.fftn(f.values)
    direct = _apply(f, truncated_density(spec, 2.0 ** k), fhat).values
    phi = LittlewoodPaleySmoother().multiplier(spec.grid, k)
    nus = {j: AnnulusMeasure(spec.kernel, j).spectrum(spec.grid) for j in range(j_lo, j_hi + 1)}
    full = sum(nus.values())
    low = sum((nus[j] for j in range(j_lo, k)), np.zeros(spec.grid.shape))
    high = sum(nus[j] for j in range(k, j_hi + 1))
    recon = np.real(np.fft.ifftn(fhat * (phi * full - phi * low + (1.0 - phi) * high)))
    scale = np.max(np.abs(direct))
    err = np.max(np.abs(direct - recon))
    if scale == 0:
        return float(err)
    return float(err / scale)


def decomposition_square_function(spec: OperatorSpec, f: SampledFunction, piece: SphereKernel,
                                  mode: str, shift: int, k_window=None) -> tuple:
    """(sum_k |[(delta - phi_k) * nu_{k+s}] * f|^2)^(1/2) (high) or the phi_k analogue (low).

    Returns (function, L2 norm).  k runs over the window, default every k with
    k + shift inside the resolvable shells.
    """
    if mode == "high" and shift < 0 or mode == "low" and shift >= 0:
        raise ValueError(f"shift {shift} does not match mode {mode!r}")
    if mode not in ("high", "low"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_grid(spec, f)
    j_lo, j_hi = spec.octaves()
    if k_window is None:
        k_window = (j_lo - shift, j_hi - shift)
    fhat = np.fft.fftn(f.values)
    sm = LittlewoodPaleySmoother()
    acc = np.zeros(spec.grid.shape)
    for k in range(k_window[0], k_window[1] + 1):
        j = k + shift
        if not j_lo <= j <= j_hi:
            continue
        phi = sm.multiplier(spec.grid, k)
        mult = (1.0 - phi) if mode == "high" else phi
        if not mult.any():
            continue
        nu = AnnulusMeasure(piece, j).spectrum(spec.grid)
        v = np.real(np.fft.ifftn(fhat * mult * nu))
        acc += v * v
    g = SampledFunction(spec.grid, np.sqrt(acc))
    return g, float(math.sqrt(np.sum(acc) * spec.grid.cell))


# rotation method ---------------------------------------------------------------

def directional_hilbert(f: SampledFunction, r1: float, r2: float) -> SampledFunction:
    """H^1_I along x_1: sum over r1 < |s| <= r2 of f(x - s e_1) h / s."""
    g = f.grid
    s = g.axis()
    w = np.zeros(g.N)
    keep = (np.abs(s) > r1) & (np.abs(s) <= r2)
    w[keep] = 1.0 / s[keep]
    what = np.fft.fft(np.fft.ifftshift(w)) * g.h
    out = np.real(np.fft.ifft(np.fft.fft(f.values, axis=0) * what[:, None], axis=0))
    return SampledFunction(g, out)


def rotation_identity_residual(f: SampledFunction, kernel: SphereKernel, r1: float, r2: float,
                               angular_nodes: int, supersample: int = 8) -> float:
    """Relative L2 gap between the shell integral and the averaged rotated 1-D integrals.

    Right side: 1/2 sum_q (2 pi/Q) Omega(phi_q) R_{-phi_q} H^1_I R_{phi_q} f.
    The left side uses sub-cell sampling so its cutoff error stays below the
    rotation side's interpolation error.
    """
    g = f.grid
    if g.n != 2:
        raise ValueError("rotation identity is checked for n = 2")
    if not 0 < r1 < r2 <= g.r_cut:
        raise ValueError(f"need 0 < r1 < r2 <= R_cut, got {r1}, {r2}")
    _, even = split_odd_even(kernel)
    if np.max(np.abs(even.values)) > 1e-10:
        raise ValueError("kernel has an even component")
    lhs = _apply(f, shell_density(kernel, g, r1, r2, supersample)).values
    Q = int(angular_nodes)
    phis = 2.0 * math.pi * np.arange(Q) / Q
    om = kernel.evaluate(phis)
    rhs = np.zeros(g.shape)
    for phi, w in zip(phis, om):
        if w == 0:
            continue
        h = directional_hilbert(rotate(f, phi), r1, r2)
        rhs += w * rotate(h, -phi).values
    rhs *= 0.5 * 2.0 * math.pi / Q
    den = math.sqrt(np.sum(lhs * lhs))
    num = math.sqrt(np.sum((lhs - rhs) ** 2))
    if den == 0:
        return float(num)
    return float(num / den)
