"""Kernels on the circle (n = 2) or on {+1, -1} (n = 1).

An n = 2 kernel carries samples on M uniform nodes theta_m = 2 pi m / M, read
as a cell-constant function (node m owns the cell of width 2 pi / M centred at
theta_m).  It may also carry a closed form, which grid operators and Fourier
quadrature prefer over the samples.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi


# closed forms -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TrigSeries:
    """c0 + sum_l (a_l cos l theta + b_l sin l theta)."""

    ells: tuple
    a: tuple
    b: tuple
    c0: float = 0.0

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, float(self.c0))
        for l, a, b in zip(self.ells, self.a, self.b):
            if a:
                out = out + a * np.cos(l * theta)
            if b:
                out = out + b * np.sin(l * theta)
        return out

    @property
    def degree(self) -> int:
        return max(self.ells, default=0)

    def coefficients(self, M: int) -> np.ndarray:
        """Complex Fourier coefficients on an M-point circle (no aliasing check)."""
        c = np.zeros(M, dtype=complex)
        c[0] += self.c0
        for l, a, b in zip(self.ells, self.a, self.b):
            c[l % M] += 0.5 * (a - 1j * b)
            c[-l % M] += 0.5 * (a + 1j * b)
        return c

    def shifted(self, dc: float) -> "TrigSeries":
        return TrigSeries(self.ells, self.a, self.b, self.c0 + dc)

    def scaled(self, s: float) -> "TrigSeries":
        return TrigSeries(self.ells, tuple(s * x for x in self.a), tuple(s * x for x in self.b), s * self.c0)

    def parity(self, odd: bool) -> "TrigSeries":
        keep = [(l, a, b) for l, a, b in zip(self.ells, self.a, self.b) if (l % 2 == 1) == odd]
        ells, a, b = (tuple(t) for t in zip(*keep)) if keep else ((), (), ())
        return TrigSeries(ells, a, b, 0.0 if odd else self.c0)


@dataclass(frozen=True, eq=False)
class FuncForm:
    """Any vectorized angular function."""

    fn: Callable

    def __call__(self, theta):
        return np.asarray(self.fn(np.asarray(theta, dtype=float)), dtype=float)

    def shifted(self, dc):
        fn = self.fn
        return FuncForm(lambda t: fn(t) + dc)

    def scaled(self, s):
        fn = self.fn
        return FuncForm(lambda t: s * fn(t))

    def parity(self, odd):
        fn = self.fn
        sgn = -1.0 if odd else 1.0
        return FuncForm(lambda t: 0.5 * (fn(t) + sgn * fn(t + math.pi)))


# kernel ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SphereKernel:
    """Omega on S^{n-1}.

    n = 1: values = (Omega(+1), Omega(-1)).  n = 2: values on M nodes.
    """

    n: int
    values: np.ndarray = field(repr=False)
    form: object = field(default=None, repr=False)
    cancellation_enforced: bool = False
    label: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if self.n == 1:
            if v.size != 2:
                raise ValueError("n=1 kernel needs (Omega(+1), Omega(-1))")
        elif self.n == 2:
            if v.size < 2 or (v.size & (v.size - 1)):
                raise ValueError(f"node count must be a power of two, got {v.size}")
        else:
            raise ValueError("only n in {1, 2}")
        if not np.all(np.isfinite(v)):
            raise ValueError("kernel values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return self.values.size

    @property
    def nodes(self) -> np.ndarray:
        if self.n == 1:
            return np.array([1.0, -1.0])
        return TWO_PI * np.arange(self.M) / self.M

    @property
    def weight(self) -> float:
        """Quadrature weight per node (counting measure when n = 1)."""
        return 1.0 if self.n == 1 else TWO_PI / self.M

    @property
    def measure(self) -> float:
        return 2.0 if self.n == 1 else TWO_PI

    def mean(self) -> float:
        return float(np.sum(self.values) * self.weight / self.measure)

    def integral(self) -> float:
        return float(np.sum(self.values) * self.weight)

    def l1(self) -> float:
        return float(np.sum(np.abs(self.values)) * self.weight)

    def l2(self) -> float:
        return float(math.sqrt(np.sum(self.values ** 2) * self.weight))

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def node_lookup(self, theta) -> np.ndarray:
        m = np.rint(np.asarray(theta, dtype=float) * self.M / TWO_PI).astype(np.int64) % self.M
        return self.values[m]

    def evaluate(self, theta) -> np.ndarray:
        """Omega at angles (n = 2) or at signs (n = 1)."""
        if self.n == 1:
            s = np.asarray(theta)
            return np.where(s >= 0, self.values[0], self.values[1])
        if self.form is not None:
            return self.form(theta)
        return self.node_lookup(theta)

    def evaluate_vec(self, *y) -> np.ndarray:
        """Omega(y/|y|) for offset arrays y (origin gets 0)."""
        if self.n == 1:
            return np.where(y[0] > 0, self.values[0], np.where(y[0] < 0, self.values[1], 0.0))
        return self.evaluate(np.mod(np.arctan2(y[1], y[0]), TWO_PI))

    def with_values(self, values, form=None, cancellation_enforced=None, label=None):
        return SphereKernel(self.n, values, form,
                            self.cancellation_enforced if cancellation_enforced is None else cancellation_enforced,
                            self.label if label is None else label)

    def scaled(self, s: float) -> "SphereKernel":
        form = self.form.scaled(s) if self.form is not None else None
        return self.with_values(self.values * s, form)

    def __add__(self, other: "SphereKernel") -> "SphereKernel":
        if other.n != self.n or other.M != self.M:
            raise ValueError("kernels live on different node sets")
        form = None
        if self.form is not None and other.form is not None:
            f1, f2 = self.form, other.form
            form = FuncForm(lambda t: f1(t) + f2(t))
        return SphereKernel(self.n, self.values + other.values, form,
                            self.cancellation_enforced and other.cancellation_enforced)


def from_form(form, M: int = 1024, label: str = "") -> SphereKernel:
    return SphereKernel(2, form(TWO_PI * np.arange(M) / M), form, False, label)


def from_values(values, label: str = "") -> SphereKernel:
    return SphereKernel(2, values, None, False, label)


def hilbert_kernel() -> SphereKernel:
    """Omega(+-1) = +-1/pi, the kernel of the Hilbert transform."""
    return SphereKernel(1, [1.0 / math.pi, -1.0 / math.pi], None, True, "hilbert")


def sin_kernel(M: int = 1024) -> SphereKernel:
    k = from_form(TrigSeries((1,), (0.0,), (1.0,)), M, "sin")
    return k.with_values(k.values, k.form, True)


def cos2_kernel(M: int = 1024) -> SphereKernel:
    k = from_form(TrigSeries((2,), (1.0,), (0.0,)), M, "cos2")
    return k.with_values(k.values, k.form, True)


def constant_kernel(c: float, M: int = 1024) -> SphereKernel:
    return from_form(TrigSeries((), (), (), float(c)), M, f"const:c={c:g}")


def twolevel_kernel(a: float = 1.5, arc: float = math.pi / 2, M: int = 1024) -> SphereKernel:
    """a on [0, arc), -a on [pi, pi + arc), zero elsewhere (odd, mean-zero)."""
    if not 0 < arc <= math.pi:
        raise ValueError("arc must lie in (0, pi]")

    def fn(t):
        t = np.mod(t, TWO_PI)
        return np.where(t < arc, a, 0.0) - np.where((t >= math.pi) & (t < math.pi + arc), a, 0.0)

    # node samples use the same half-open arcs, so they stay exactly antisymmetric
    k = from_form(FuncForm(fn), M, f"twolevel:a={a:g},arc={arc / math.pi:g}pi")
    return k.with_values(k.values, k.form, True)


def _atom_profile(u):
    # odd triangle bump: 0 at u = 0 and |u| = 1, +-1 at u = +-1/2
    au = np.abs(u)
    return np.where(au < 1, np.sign(u) * (1.0 - np.abs(2.0 * au - 1.0)), 0.0)


def h1_atom(center: float, radius: float, M: int = 1024) -> SphereKernel:
    """Mean-zero odd bump on the arc of half-width radius about center, sup <= 1/(2 radius)."""
    if not 0 < radius <= math.pi / 2:
        raise ValueError(f"atom radius must lie in (0, pi/2], got {radius}")

    def fn(t):
        d = np.mod(np.asarray(t) - center + math.pi, TWO_PI) - math.pi
        return _atom_profile(d / radius) / (2.0 * radius)

    vals = fn(TWO_PI * np.arange(M) / M)
    support = vals != 0
    if support.any():
        vals[support] -= vals[support].mean()
        vals *= min(1.0, 1.0 / (2.0 * radius * np.max(np.abs(vals))))
    return SphereKernel(2, vals, FuncForm(fn), True, f"atom:c={center:g},r={radius / math.pi:g}pi")


def gs_lacunary_kernel(alpha: float = 2.0, kmin: int = 5, kmax: int = 21, M: int = 1024) -> SphereKernel:
    """Lacunary cosine sum over l = 2^k with weights l (ln(l / 2 pi))^(-1-alpha).

    Along the ray phi = 0 the term l dominates the Fourier transform near
    |xi| = l / (2 pi), so |nu_hat| follows (ln |xi|)^(-1-alpha) there.
    Node samples are aliased for l > M/2; only the closed form is meaningful.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    ells = tuple(2 ** k for k in range(kmin, kmax + 1))
    a = tuple(l * math.log(l / TWO_PI) ** (-1.0 - alpha) for l in ells)
    k = from_form(TrigSeries(ells, a, (0.0,) * len(ells)), M, f"gs:alpha={alpha:g}")
    return k.with_values(k.values, k.form, True)


# operations -----------------------------------------------------------------

def enforce_cancellation(k: SphereKernel) -> tuple:
    """Subtract the node-quadrature spherical mean; returns (kernel, constant)."""
    c = k.mean()
    form = k.form.shifted(-c) if k.form is not None else None
    return k.with_values(k.values - c, form, True), c


def split_odd_even(k: SphereKernel) -> tuple:
    """Omega_o(theta) = (Omega(theta) - Omega(theta + pi))/2 and the even part."""
    if k.n == 1:
        p, m = k.values
        o = SphereKernel(1, [(p - m) / 2, (m - p) / 2], None, True)
        e = SphereKernel(1, [(p + m) / 2, (p + m) / 2], None, k.cancellation_enforced)
        return o, e
    if k.M % 2:
        raise ValueError("odd node count has no antipodal nodes")
    anti = np.roll(k.values, -k.M // 2)
    odd = 0.5 * (k.values - anti)
    even = k.values - odd
    fo = k.form.parity(True) if k.form is not None else None
    fe = k.form.parity(False) if k.form is not None else None
    return (k.with_values(odd, fo, True),
            k.with_values(even, fe, k.cancellation_enforced))


def class_functional(k: SphereKernel, cls: str, r: float | None = None) -> float:
    """Node quadrature of the Lr, L log+ L, L (log+ L)^(1/2) or L1 functional."""
    a = np.abs(k.values)
    w = k.weight
    name = cls.lower()
    if name in ("lr", "l^r"):
        if r is None or r <= 1:
            raise ValueError(f"Lr needs r > 1, got {r}")
        return float((np.sum(a ** r) * w) ** (1.0 / r))
    lp = np.log(np.maximum(a, 1.0))
    if name == "llogl":
        return float(np.sum(a * lp) * w)
    if name == "lloglhalf":
        return float(np.sum(a * np.sqrt(lp)) * w)
    if name == "l1":
        return float(np.sum(a) * w)
    raise ValueError(f"unknown class {cls!r}")


class GSValue(NamedTuple):
    value: float
    direction: float


def _log_weight(u, alpha):
    c = np.abs(np.cos(u))
    return (-np.log(c)) ** (1.0 + alpha)


def _graded(z, d, alpha, levels, points):
    # midpoint rule on the geometric mesh z + d [2^-l-1, 2^-l], plus [0, 2^-levels]
    if d == 0:
        return 0.0
    edges = np.concatenate([[0.0], 2.0 ** -np.arange(levels, -1, -1.0)]) * d
    lo, hi = edges[:-1], edges[1:]
    mids = (np.arange(points) + 0.5) / points
    u = z + lo[:, None] + (hi - lo)[:, None] * mids[None, :]
    return float(np.sum(_log_weight(u, alpha).mean(axis=1) * np.abs(hi - lo)))


def gs_alpha_functional(k: SphereKernel, alpha: float, xi_nodes: int,
                        levels: int = 12, points: int = 4) -> GSValue:
    """sup over xi of the integral of |Omega| (log 1/|theta . xi|)^(1+alpha).

    Directions phi_i = 2 pi i / xi_nodes.  The weight is integrated over a
    lattice of sub-intervals of width 2 pi / xi_nodes (midpoint rule, graded
    toward the zeros of cos), then summed cell by cell against |Omega|.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if k.n != 2:
        raise ValueError("G_alpha functional is defined for n = 2")
    M = k.M
    if xi_nodes < M or xi_nodes % M:
        raise ValueError("xi_nodes must be a multiple of the kernel node count")
    X = xi_nodes
    step = TWO_PI / X
    u = -math.pi / M + step * np.arange(X + 1)
    mids = (np.arange(points) + 0.5) / points
    sub = np.empty(X)
    zeros = np.array([-1.5, -0.5, 0.5, 1.5, 2.5]) * math.pi
    for i in range(X):
        a, b = u[i], u[i + 1]
        zin = zeros[(zeros >= a) & (zeros <= b)]
        if zin.size:
            z = float(zin[0])
            sub[i] = _graded(z, b - z, alpha, levels, points) + _graded(z, a - z, alpha, levels, points)
        else:
            sub[i] = np.mean(_log_weight(a + (b - a) * mids, alpha)) * (b - a)
    csum = np.concatenate([[0.0], np.cumsum(np.concatenate([sub, sub]))])
    r = X // M
    i_idx = np.arange(X)[:, None]
    m_idx = np.arange(M)[None, :]
    k0 = (m_idx * r - i_idx) % X
    cell = csum[k0 + r] - csum[k0]
    vals = cell @ np.abs(k.values)
    best = int(np.argmax(vals))
    return GSValue(float(vals[best]), TWO_PI * best / X)


@dataclass(frozen=True, eq=False)
class KernelDecomposition:
    base: SphereKernel
    remainder: SphereKernel
    pieces: list
    gamma: frozenset
    level_measures: dict = field(default_factory=dict)

    def reconstruct(self) -> np.ndarray:
        v = self.remainder.values.copy()
        for m, c, piece in self.pieces:
            v = v + c * piece.values
        return v

    def log_ratio(self) -> float:
        """sum_{m in Gamma} m c_m over the L log+ L functional (0 if both vanish)."""
        num = sum(m * c for m, c, _ in self.pieces)
        den = class_functional(self.base, "LlogL")
        if num == 0:
            return 0.0
        return num / den if den > 0 else math.inf


def omega_decomposition(k: SphereKernel) -> KernelDecomposition:
    """Level sets E_m = {2^(m-1) <= |Omega| < 2^m}, retained when sigma(E_m) > 2^(-4m)."""
    if not (k.cancellation_enforced or abs(k.mean()) <= 1e-12 * (1 + k.l1())):
        raise ValueError("decomposition needs a mean-zero kernel")
    a = np.abs(k.values)
    w = k.weight
    _, expo = np.frexp(a)
    level = np.where(a >= 1.0, expo, 0)
    pieces = []
    gamma = set()
    measures = {}
    rem = k.values.astype(float).copy()
    for m in sorted(set(level[level >= 1].tolist())):
        E = level == m
        sig = E.sum() * w
        measures[m] = sig
        if sig <= 2.0 ** (-4 * m):
            continue
        c = float(np.sum(a[E]) * w)
        if c == 0:
            continue
        piece = (k.values * E - np.sum(k.values[E]) * w / k.measure) / c
        gamma.add(m)
        pk = SphereKernel(k.n, piece, None, True, f"piece:m={m}")
        pieces.append((m, c, pk))
        rem = rem - c * pk.values
    r = SphereKernel(k.n, rem, None, True, "remainder")
    return KernelDecomposition(k, r, pieces, frozenset(gamma), measures)


# kernel spec strings --------------------------------------------------------

class KernelSpecError(ValueError):
    def __init__(self, msg, text, pos):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.pos = pos


_NUM = re.compile(r"\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(pi)?\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")

_PARAMS = {
    "sin": {},
    "cos2": {},
    "hilbert": {},
    "const": {"c": 1.0},
    "twolevel": {"a": 1.5, "arc": math.pi / 2},
    "atom": {"c": 0.0, "r": math.pi / 4},
    "gs": {"alpha": 2.0, "kmin": 5, "kmax": 21},
}


def _number(text, full, pos):
    m = _NUM.match(text)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise KernelSpecError(f"bad number {text!r}", full, pos)
    v = float(m.group(1)) if m.group(1) is not None else 1.0
    if m.group(2):
        v *= math.pi
    if m.group(3):
        v /= float(m.group(3))
    return v


def parse_kernel(text: str, M: int = 1024) -> SphereKernel:
    """Build a kernel from strings like "twolevel:a=1.5,arc=0.5pi" or "gs:alpha=2"."""
    name, sep, rest = text.partition(":")
    key = name.strip().lower()
    if key not in _PARAMS:
        raise KernelSpecError(f"unknown kernel {name.strip()!r}", text, 0)
    params = dict(_PARAMS[key])
    pos = len(name) + 1
    if sep and rest.strip():
        for item in rest.split(","):
            k_, eq, v = item.partition("=")
            kk = k_.strip()
            if not eq:
                raise KernelSpecError("expected key=value", text, pos)
            if kk not in params:
                raise KernelSpecError(f"unknown parameter {kk!r} for {key}", text, pos)
            params[kk] = _number(v, text, pos + len(k_) + 1)
            pos += len(item) + 1
    elif sep:
        raise KernelSpecError("empty parameter list", text, pos)
    if key == "sin":
        return sin_kernel(M)
    if key == "cos2":
        return cos2_kernel(M)
    if key == "hilbert":
        return hilbert_kernel()
    if key == "const":
        return constant_kernel(params["c"], M)
    if key == "twolevel":
        return twolevel_kernel(params["a"], params["arc"], M)
    if key == "atom":
        return h1_atom(params["c"], params["r"], M)
    return gs_lacunary_kernel(params["alpha"], int(params["kmin"]), int(params["kmax"]), M)
