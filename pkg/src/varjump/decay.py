"""Fourier transforms of annulus measures and decay fits along rays.

The radial integral is done exactly:
    int_{r1}^{r2} e^{-i a r} dr / r = Ci(|a| r2) - Ci(|a| r1) - i sgn(a) (Si(|a| r2) - Si(|a| r1))
so only the angular integral is discretized.  Trigonometric kernels use a
uniform rule fine enough for the angular bandwidth of the radial factor,
paired with the kernel's coefficients through one FFT.  Other kernels are
integrated as their cell-constant node model with Gauss-Legendre panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import sici

from .operators import AnnulusMeasure
from .sphere import TrigSeries

TWO_PI = 2.0 * math.pi


def radial_integral(a, r1: float, r2: float) -> np.ndarray:
    """int_{r1}^{r2} exp(-i a r) dr / r, vectorized in a."""
    a = np.asarray(a, dtype=float)
    out = np.empty(a.shape, dtype=complex)
    z = a == 0
    out[z] = math.log(r2 / r1)
    aa = np.abs(a[~z])
    s2, c2 = sici(aa * r2)
    s1, c1 = sici(aa * r1)
    out[~z] = (c2 - c1) - 1j * np.sign(a[~z]) * (s2 - s1)
    return out


def _pow2_at_least(x: float) -> int:
    return 1 << max(6, int(math.ceil(math.log2(max(x, 1.0)))))


_GL16 = np.polynomial.legendre.leggauss(16)


def nu_hat(measure: AnnulusMeasure, xi, refine: float = 1.0) -> complex:
    """Fourier transform of Omega(y')|y|^-n on 2^j < |y| <= 2^(j+1) at xi.

    Independent of any spatial grid.  `refine` scales every angular point count.
    """
    k = measure.kernel
    r1, r2 = measure.radii
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if k.n == 1:
        a = TWO_PI * float(xi[0])
        R = radial_integral(np.array([a, -a]), r1, r2)
        return complex(k.values[0] * R[0] + k.values[1] * R[1])
    if xi.size != 2:
        raise ValueError("n = 2 needs a 2-vector frequency")
    rho = float(math.hypot(xi[0], xi[1]))
    phi = math.atan2(xi[1], xi[0])
    a = TWO_PI * rho
    if isinstance(k.form, TrigSeries):
        # radial factor g(theta) = R(a cos(theta - phi)) is essentially band-limited
        # to |l| <~ a r2; sample it and pair its Fourier coefficients with Omega's
        Ma = _pow2_at_least(2.0 * refine * (1.25 * a * r2 + 32.0))
        th = TWO_PI * np.arange(Ma) / Ma
        G = np.fft.fft(radial_integral(a * np.cos(th - phi), r1, r2)) / Ma
        f = k.form
        tot = TWO_PI * f.c0 * G[0]
        for l, ca, sb in zip(f.ells, f.a, f.b):
            if l >= Ma // 2:
                continue
            gm, gp = G[-l % Ma], G[l % Ma]
            tot += math.pi * ca * (gm + gp) + math.pi * sb * (gm - gp) / 1j
        return complex(tot)
    # cell-constant node model, panels with at most 12 radians of phase each
    M = k.M
    width = TWO_PI / M
    panels = max(1, int(math.ceil(refine * a * r2 * width / 12.0)))
    x, w = _GL16
    local = ((np.arange(panels)[:, None] + 0.5 * (x[None, :] + 1.0)) / panels - 0.5).ravel() * width
    wt = np.tile(w, panels) * 0.5 * width / panels
    nodes, vals = k.nodes, k.values
    step = max(1, 2_000_000 // local.size)
    tot = 0j
    for s in range(0, M, step):
        R = radial_integral(a * np.cos(local[None, :] + nodes[s:s + step, None] - phi), r1, r2)
        tot += np.sum(vals[s:s + step] * (R @ wt))
    return complex(tot)


@dataclass(frozen=True)
class DecayProfile:
    exponent: float
    intercept: float
    residual: float
    fit: str
    table: tuple  # rows (k, |2^k xi|, |nu_hat|)


def decay_profile(measure: AnnulusMeasure, direction, k_range, fit: str = "power",
                  base: float = 1.0, refine: float = 1.0) -> DecayProfile:
    """Sample |nu_hat(2^k xi)| for k in k_range along a ray and fit a slope.

    direction: angle (n = 2), or +-1 (n = 1); |xi| = base.  power fits
    log|nu_hat| against log|2^k xi|; logpower against log log|2^k xi|.
    """
    if fit not in ("power", "logpower"):
        raise ValueError(f"unknown fit {fit!r}")
    k0, k1 = k_range
    rows = []
    for k in range(int(k0), int(k1) + 1):
        rho = base * 2.0 ** k
        if rho > 1e6:
            raise ValueError(f"|2^k xi| = {rho:g} exceeds the quadrature range 1e6")
        if measure.kernel.n == 1:
            xi = np.array([rho * (1.0 if direction >= 0 else -1.0)])
        else:
            xi = rho * np.array([math.cos(direction), math.sin(direction)])
        rows.append((k, rho, abs(nu_hat(measure, xi, refine))))
    return fit_profile(rows, fit)


def fit_profile(rows, fit: str) -> DecayProfile:
    pts = [(r, v) for _, r, v in rows if v > 0 and math.isfinite(v) and (fit == "power" or r > 1.0)]
    if len(pts) < 4:
        raise ValueError(f"only {len(pts)} usable points for a {fit} fit")
    r = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    x = np.log(r) if fit == "power" else np.log(np.log(r))
    y = np.log(v)
    slope, icpt = np.polyfit(x, y, 1)
    res = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    return DecayProfile(float(slope), float(icpt), res, fit, tuple(rows))


def piece_envelope(rho, m: int):
    """Shape min{rho^(-1/(3m)), rho} of the decay bound for an L log L piece."""
    rho = np.asarray(rho, dtype=float)
    return np.minimum(rho ** (-1.0 / (3 * m)), rho)


def envelope_check(rows, m: int, slack: float = 0.05) -> tuple:
    """Fit C on the lower-frequency half, then test every sample against (1 + slack) C env.

    Returns (C, worst ratio |nu_hat| / (C env), passed).
    """
    rows = sorted(rows, key=lambda r: r[1])
    rho = np.array([r[1] for r in rows])
    val = np.array([r[2] for r in rows])
    env = piece_envelope(rho, m)
    half = max(1, len(rows) // 2)
    C = float(np.max(val[:half] / env[:half]))
    worst = float(np.max(val / (C * env)))
    return C, worst, worst <= 1.0 + slack


def one_dim_average_decay(n: int, xi: float, refine: int = 1) -> tuple:
    """(|int_0^1 e^{-2 pi i r xi} r^(n-1) dr|, |xi| times that), composite 16-point GL."""
    if n < 1:
        raise ValueError("n must be >= 1")
    panels = refine * max(1, int(math.ceil(abs(xi))))
    x, w = _GL16
    edges = np.arange(panels)[:, None] / panels
    r = (edges + 0.5 * (x[None, :] + 1.0) / panels).ravel()
    wt = np.tile(w, panels) * 0.5 / panels
    val = abs(np.sum(wt * r ** (n - 1) * np.exp(-2j * math.pi * r * xi)))
    return float(val), float(abs(xi) * val)
