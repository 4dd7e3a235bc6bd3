import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varjump.grid import (Grid, SampledFunction, ScaleGrid, lp_norm, convolve, rotate, band_limited,
                          kernel_spectrum)


def test_grid_validation():
    for bad in (100, 4, 0):
        with pytest.raises(ValueError, match="power of two"):
            Grid(2, bad)
    with pytest.raises(ValueError):
        Grid(3, 16)
    with pytest.raises(ValueError):
        Grid(1, 16, L=-1.0)


def test_grid_layout():
    g = Grid(2, 16, 1.0)
    assert g.h == 0.125
    assert g.coord(8) == 0.0
    assert g.index(0.0) == 8
    assert g.r_cut == 0.5
    assert g.mesh()[0].shape == (16, 16)


def test_lp_norm_examples():
    g = Grid(2, 32)
    assert lp_norm(SampledFunction.constant(g, 1.0), 2) == pytest.approx(2.0)
    assert lp_norm(SampledFunction.constant(g, 0.0), 3) == 0.0
    g1 = Grid(1, 64)
    left = SampledFunction.from_callable(g1, lambda x: (x < 0) * 1.0)
    assert lp_norm(left, 1) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        lp_norm(left, 0.5)


def test_sampled_function_rejects_nan():
    g = Grid(1, 8)
    with pytest.raises(ValueError):
        SampledFunction(g, [np.nan] * 8)
    with pytest.raises(ValueError):
        SampledFunction(g, [0.0] * 7)


def test_convolve_delta_identity():
    g = Grid(2, 32)
    rng = np.random.default_rng(0)
    f = SampledFunction(g, rng.standard_normal(g.shape))
    d = np.zeros(g.shape)
    d[16, 16] = 1.0 / g.cell
    out = convolve(f, SampledFunction(g, d))
    assert np.max(np.abs(out.values - f.values)) <= 1e-12
    zero = convolve(f, SampledFunction.constant(g, 0.0))
    assert np.all(zero.values == 0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_convolve_commutes(seed):
    g = Grid(2, 16)
    rng = np.random.default_rng(seed)
    f = SampledFunction(g, rng.standard_normal(g.shape))
    k = SampledFunction(g, rng.standard_normal(g.shape))
    a = convolve(f, k).values
    b = convolve(k, f).values
    tol = 1e-12 * np.max(np.abs(f.values)) * np.sum(np.abs(k.values)) * g.cell * 10
    assert np.max(np.abs(a - b)) <= tol


def test_rotate_zero_angle_identity():
    g = Grid(2, 32)
    f = SampledFunction(g, np.random.default_rng(1).standard_normal(g.shape))
    assert np.array_equal(rotate(f, 0.0).values, f.values)


def test_rotate_radial_gaussian():
    # error against the analytic (unchanged) radial function shrinks at second order;
    # corner points rotate out of the square and wrap, so compare inside the disc |x| < L
    errs = []
    for N in (64, 128):
        g = Grid(2, N)
        f = SampledFunction.from_callable(g, lambda x, y: np.exp(-(x * x + y * y) / 0.1))
        x, y = g.mesh()
        inside = x * x + y * y < 0.9
        errs.append(np.max(np.abs(rotate(f, math.pi / 3).values - f.values)[inside]))
    assert errs[0] < 1e-2
    assert errs[1] < errs[0] / 3


def test_rotate_by_pi_odd():
    g = Grid(2, 64)
    f = SampledFunction.from_callable(g, lambda x, y: x * np.exp(-(x * x + y * y)))
    r = rotate(f, math.pi)
    # rotation by pi maps index offset u to -u exactly; compare away from the x = -L column
    assert np.max(np.abs(r.values[1:, 1:] + f.values[1:, 1:])) < 1e-12


def test_scale_grid_layout():
    sg = ScaleGrid(-2, 0, 4)
    assert len(sg) == 13
    assert sg.scales[0] == 0.25 and sg.scales[-1] == 2.0
    assert list(sg.dyadic_index) == [0, 4, 8, 12]
    assert sg.octave_bounds(-1) == (4, 8)
    with pytest.raises(ValueError):
        sg.octave_bounds(1)
    with pytest.raises(ValueError):
        ScaleGrid(1, 0)


def test_band_limited_is_grid_independent():
    vals = []
    for N in (32, 64):
        g = Grid(2, N)
        f = band_limited(g, np.random.default_rng(5), 3.0)
        vals.append(f.values[::N // 16, ::N // 16])
    assert np.max(np.abs(vals[0] - vals[1])) < 1e-10


def test_band_limited_spectrum_support():
    g = Grid(2, 64)
    f = band_limited(g, np.random.default_rng(2), 4.0)
    spec = np.abs(np.fft.fftn(f.values))
    assert np.max(spec[g.freq_norm() > 4.0 + 1e-9]) < 1e-9 * np.max(spec)
    with pytest.raises(ValueError):
        band_limited(Grid(1, 8), np.random.default_rng(0), 10.0)


def test_kernel_spectrum_of_delta():
    g = Grid(1, 16)
    d = np.zeros(16)
    d[8] = 1.0 / g.h
    assert np.allclose(kernel_spectrum(d, g), 1.0)
