"""q-variation, lambda-jump counts and the short 2-variation on sampled families.

Convention: the leading term of V_q is |a_{t0}|^q inside the q-th root, so
sup |a| <= V_q holds for every series.  Pass powered_first=False for the
unpowered variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import impl
from .grid import ScaleGrid


@dataclass(frozen=True, eq=False)
class SeriesSample:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float).reshape(-1)
        v = np.array(self.values, dtype=float).reshape(-1)
        if t.size != v.size:
            raise ValueError(f"times/values length mismatch: {t.size} vs {v.size}")
        if t.size and (np.any(t <= 0) or np.any(np.diff(t) <= 0)):
            raise ValueError("times must be positive and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def of(cls, values, times=None) -> "SeriesSample":
        v = np.asarray(values, dtype=float).reshape(-1)
        return cls(np.arange(1, v.size + 1, dtype=float) if times is None else times, v)

    def __len__(self):
        return self.values.size


def _values(s) -> np.ndarray:
    return s.values if isinstance(s, SeriesSample) else np.asarray(s, dtype=float).reshape(-1)


def _rows(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    return np.ascontiguousarray(a)


def vq_rows(a, q: float, powered_first: bool = True) -> np.ndarray:
    """V_q of every row of a (rows are series sharing times)."""
    q = float(q)
    if not q >= 1:
        raise ValueError(f"q must be >= 1, got {q}")
    a = _rows(a)
    if a.shape[1] == 0:
        raise ValueError("empty series")
    best = impl.vq_rows(a, q, bool(powered_first))
    return best ** (1.0 / q)


def vq_norm(s, q: float, powered_first: bool = True) -> float:
    return float(vq_rows(_values(s), q, powered_first)[0])


def jump_rows(a, lam) -> np.ndarray:
    """Greedy lambda-jump count of every row (lam scalar or one per row).

    Scans from the current anchor keeping the running min and max; the first
    index where max - min > lam closes a jump and becomes the next anchor.
    """
    a = _rows(a)
    if np.ndim(lam):
        lam = np.ascontiguousarray(lam, dtype=np.float64)
        if lam.shape != (a.shape[0],):
            raise ValueError("need one lambda per row")
        if not np.all(lam > 0):
            raise ValueError("lambda must be positive")
        return impl.jump_rows_each(a, lam)
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return impl.jump_rows(a, float(lam))


def jump_count(s, lam: float) -> int:
    return int(jump_rows(_values(s), lam)[0])


def block_sq_rows(a, lo: int, hi: int) -> np.ndarray:
    """Squared short 2-variation of columns lo..hi (inclusive) of every row."""
    a = _rows(a)
    return impl.block_rows(a, int(lo), int(hi) + 1)


def short_variation_block(s) -> float:
    v = _values(s)
    if v.size == 0:
        return 0.0
    return float(math.sqrt(block_sq_rows(v, 0, v.size - 1)[0]))


@dataclass(frozen=True, eq=False)
class ScaleFamily:
    """values[x, t]: the family A_t f(x) at every point x and scale t."""

    scale_grid: ScaleGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if v.ndim == 1:
            v = v[None, :]
        if v.shape[1] != len(self.scale_grid):
            raise ValueError(f"family has {v.shape[1]} scales, grid has {len(self.scale_grid)}")
        if not np.all(np.isfinite(v)):
            raise ValueError("family values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def point_count(self) -> int:
        return self.values.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.scale_grid.scales

    def series(self, x: int) -> SeriesSample:
        return SeriesSample(self.times, self.values[x])

    def dyadic_values(self) -> np.ndarray:
        return np.ascontiguousarray(self.values[:, self.scale_grid.dyadic_index])

    def subset(self, idx) -> "ScaleFamily":
        return ScaleFamily(self.scale_grid, self.values[np.atleast_1d(idx)])


def dyadic_jump_rows(fam: ScaleFamily, lam: float) -> np.ndarray:
    return jump_rows(fam.dyadic_values(), lam)


def dyadic_jump_count(fam: ScaleFamily, x: int, lam: float) -> int:
    return int(jump_rows(fam.dyadic_values()[x], lam)[0])


def block_field(fam: ScaleFamily) -> np.ndarray:
    """(points, octaves) array of squared V_{2,j}; octaves are closed [2^j, 2^(j+1)]."""
    sg = fam.scale_grid
    cols = []
    for j in range(sg.j_min, sg.j_max + 1):
        lo, hi = sg.octave_bounds(j)
        cols.append(block_sq_rows(fam.values, lo, hi))
    return np.stack(cols, axis=1)


def s2_rows(fam: ScaleFamily) -> np.ndarray:
    return np.sqrt(block_field(fam).sum(axis=1))


def s2_total(fam: ScaleFamily, x: int) -> float:
    return float(s2_rows(fam.subset(x))[0])


def pointwise_control_ratio(s, lam: float, q: float) -> float:
    """lam N_lam^(1/q) / (2^(1+1/q) V_q), 0 when there are no jumps."""
    n = jump_count(s, lam)
    if n == 0:
        return 0.0
    v = vq_norm(s, q)
    assert v > 0, "jumps without variation"
    return lam * n ** (1.0 / q) / (2.0 ** (1.0 + 1.0 / q) * v)


def control_ratio_rows(a, lam: float, q: float) -> np.ndarray:
    n = jump_rows(a, lam)
    v = vq_rows(a, q)
    out = np.zeros(n.shape)
    hit = n > 0
    out[hit] = lam * n[hit] ** (1.0 / q) / (2.0 ** (1.0 + 1.0 / q) * v[hit])
    return out


def jsw_ratio_rows(fam: ScaleFamily, lam: float) -> np.ndarray:
    """lam sqrt(N_lam) / (S_2 + lam sqrt(N^d_{lam/3})) per point; 0/0 -> 0."""
    num = lam * np.sqrt(jump_rows(fam.values, lam))
    den = s2_rows(fam) + lam * np.sqrt(dyadic_jump_rows(fam, lam / 3.0))
    out = np.zeros(num.shape)
    ok = num > 0
    out[ok] = num[ok] / den[ok]
    return out


def _pair_gaps(a):
    i, j = np.triu_indices(a.shape[1], 1)
    return np.abs(a[:, j] - a[:, i])


def jsw_sup_rows(fam: ScaleFamily, chunk: int = 256) -> tuple:
    """Per point, the sup over lambda of the comparison ratio and the lambda attaining it.

    Both jump counts are step functions of lambda and the ratio increases in
    lambda between steps, so the sup is a left limit at a breakpoint: a gap
    |a_t - a_s| of the full series or three times a gap of the dyadic series.
    """
    v = fam.values
    d = fam.dyadic_values()
    s2 = s2_rows(fam)
    best = np.zeros(v.shape[0])
    arg = np.zeros(v.shape[0])
    for lo in range(0, v.shape[0], chunk):
        vv, dd = v[lo:lo + chunk], d[lo:lo + chunk]
        cand = np.concatenate([_pair_gaps(vv), 3.0 * _pair_gaps(dd)], axis=1)
        cand = cand * (1.0 - 1e-9)
        P, C = cand.shape
        lam = cand.reshape(-1)
        ok = lam > 0
        lam_safe = np.where(ok, lam, 1.0)
        nf = jump_rows(np.repeat(vv, C, axis=0), lam_safe)
        nd = jump_rows(np.repeat(dd, C, axis=0), lam_safe / 3.0)
        num = lam_safe * np.sqrt(nf)
        den = np.repeat(s2[lo:lo + chunk], C) + lam_safe * np.sqrt(nd)
        r = np.where(ok & (num > 0), num / np.where(den > 0, den, 1.0), 0.0).reshape(P, C)
        k = np.argmax(r, axis=1)
        best[lo:lo + chunk] = r[np.arange(P), k]
        arg[lo:lo + chunk] = cand[np.arange(P), k]
    return best, arg


def jsw_comparison_ratio(fam: ScaleFamily, x: int, lam: float) -> float:
    return float(jsw_ratio_rows(fam.subset(x), lam)[0])


def v2_interpolation_ratio(s: SeriesSample) -> float:
    """V_2 / (||a||_2^(1/2) ||a'||_2^(1/2)) with trapezoid norms on the time span.

    V_2 here is the increment-only 2-variation (no leading |a_t0| term), the
    seminorm the interpolation bound is about.
    """
    if len(s) < 3:
        raise ValueError("need at least 3 samples")
    t, a = s.times, s.values
    da = np.gradient(a, t, edge_order=2)
    na = math.sqrt(np.trapezoid(a * a, t))
    nd = math.sqrt(np.trapezoid(da * da, t))
    v2 = short_variation_block(s)
    if v2 == 0:
        return 0.0
    den = math.sqrt(na * nd)
    return v2 / den if den > 0 else math.inf
