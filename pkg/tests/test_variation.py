import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varjump.grid import ScaleGrid
from varjump.oracles import vq_exhaustive, jump_exhaustive, increment_variation_exhaustive
from varjump.variation import (SeriesSample, ScaleFamily, vq_norm, vq_rows, jump_count, jump_rows,
                               short_variation_block, dyadic_jump_count, block_field, s2_total,
                               pointwise_control_ratio, jsw_comparison_ratio, jsw_sup_rows,
                               jsw_ratio_rows, v2_interpolation_ratio)

series = st.lists(st.floats(-10, 10, allow_nan=False, allow_subnormal=False), min_size=1, max_size=9)
qs = st.sampled_from([1.0, 1.5, 2.0, 2.5, 3.0, 6.0])


def test_vq_examples():
    assert vq_norm([5, 5, 5], 2) == 5.0
    assert vq_norm([0, 1], 2) == 1.0
    assert vq_norm([1, -1, 1, -1], 2) == pytest.approx(math.sqrt(13), abs=1e-12)


def test_vq_unpowered_first_term():
    # |a0| enters unpowered: best chain 0 -> 3 gives 2 + 1^2
    assert vq_norm([2.0, 3.0], 2, powered_first=False) == pytest.approx(math.sqrt(3.0))
    assert vq_exhaustive([2.0, 3.0], 2, powered_first=False) == pytest.approx(math.sqrt(3.0))


def test_vq_rejects_bad_q():
    with pytest.raises(ValueError):
        vq_norm([1.0, 2.0], 0.5)


@settings(max_examples=200, deadline=None)
@given(series, qs)
def test_vq_matches_oracle(v, q):
    assert vq_norm(v, q) == pytest.approx(vq_exhaustive(v, q), rel=1e-12, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(series, st.floats(1, 6))
def test_vq_monotone_under_extension(v, q):
    # adding a point can only add candidate subsequences
    assert vq_norm(v + [v[-1] + 1.0], q) >= vq_norm(v, q) - 1e-12


@settings(max_examples=100, deadline=None)
@given(series, st.floats(-3, 3, allow_nan=False))
def test_increment_part_shift_invariant(v, c):
    a = short_variation_block(v)
    b = short_variation_block([x + c for x in v])
    assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


def test_jump_examples():
    assert jump_count([3, 3, 3], 0.1) == 0
    assert jump_count([0, 2, 0, 2], 1) == 3
    assert jump_count([0, 1, 2, 3, 4], 1.5) == 2
    # anchor-only scan misses this one: 0.5 then -0.6 spans 1.1 > 1
    assert jump_count([0, 0.5, -0.6], 1.0) == 1
    assert jump_exhaustive([0, 0.5, -0.6], 1.0) == 1


def test_jump_ties_are_not_jumps():
    assert jump_count([0.0, 1.0, 0.0], 1.0) == 0
    assert jump_exhaustive([0.0, 1.0, 0.0], 1.0) == 0


def test_jump_rejects_nonpositive_lambda():
    with pytest.raises(ValueError):
        jump_count([0, 1], 0.0)
    with pytest.raises(ValueError):
        jump_rows(np.zeros((2, 3)), np.array([1.0, -1.0]))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(-4, 4).map(lambda x: x / 4), min_size=1, max_size=10),
       st.sampled_from([0.1, 0.25, 0.5, 0.75, 1.0, 1.6]))
def test_jump_matches_oracle(v, lam):
    assert jump_count(v, lam) == jump_exhaustive(v, lam)


@settings(max_examples=100, deadline=None)
@given(series, st.floats(0.05, 5))
def test_jump_monotone_in_lambda(v, lam):
    assert jump_count(v, 2 * lam) <= jump_count(v, lam)


def test_per_row_lambda_matches_scalar():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((50, 20))
    lam = rng.uniform(0.1, 2, 50)
    each = jump_rows(a, lam)
    for i in range(50):
        assert each[i] == jump_count(a[i], lam[i])


def test_short_variation_examples():
    assert short_variation_block([2, 2, 2, 2]) == 0.0
    assert short_variation_block([0, 1, 3, 7]) == pytest.approx(7.0)
    for m in range(2, 11):
        alt = [0.3 * (-1) ** i for i in range(m)]
        assert short_variation_block(alt) == pytest.approx(2 * 0.3 * math.sqrt(m - 1))
        assert short_variation_block(alt) == pytest.approx(increment_variation_exhaustive(alt))


def test_short_variation_single_point():
    assert short_variation_block([4.0]) == 0.0


def _family(values, j0=0, j1=1, s=2):
    return ScaleFamily(ScaleGrid(j0, j1, s), np.asarray(values, dtype=float)[None, :])


def test_dyadic_jumps_purely_dyadic_grid():
    rng = np.random.default_rng(4)
    v = rng.standard_normal(7)
    fam = _family(v, 0, 5, 1)
    assert dyadic_jump_count(fam, 0, 0.5) == jump_count(v, 0.5)


def test_in_octave_oscillation():
    # scales 1, 1.41, 2, 2.83, 4: the bump sits strictly between dyadic points
    v = [0.0, 1.0, 0.0, 0.0, 0.0]
    fam = _family(v)
    assert dyadic_jump_count(fam, 0, 0.5) == 0
    assert jump_count(v, 0.5) >= 1
    r = jsw_comparison_ratio(fam, 0, 0.5)
    assert 0 < r <= 1


def test_s2_examples():
    fam = _family([1.0, 1.0, 1.0, 1.0, 1.0])
    assert s2_total(fam, 0) == 0.0
    one = _family([0.0, 0.7, 0.0, 0.0, 0.0])
    assert s2_total(one, 0) == pytest.approx(math.sqrt(block_field(one)[0, 0]))
    # octave blocks [0,2] and [2,4]: values 3 and 4
    two = _family([0.0, 0.0, 3.0, 3.0, 7.0])
    bf = block_field(two)[0]
    assert np.allclose(np.sqrt(bf), [3.0, 4.0])
    assert s2_total(two, 0) == pytest.approx(5.0)


def test_control_ratio_examples():
    assert pointwise_control_ratio([2, 2, 2], 0.5, 2) == 0.0
    r = pointwise_control_ratio([1, -1, 1, -1], 1.0, 2)
    assert r == pytest.approx(math.sqrt(3) / (2 ** 1.5 * math.sqrt(13)), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(series, st.floats(0.01, 10), st.sampled_from([2.0, 3.0, 6.0]))
def test_control_ratio_at_most_one(v, lam, q):
    assert pointwise_control_ratio(v, lam, q) <= 1.0


def test_jsw_constant_family_zero():
    fam = _family([2.0] * 5)
    assert jsw_comparison_ratio(fam, 0, 0.3) == 0.0
    best, _ = jsw_sup_rows(fam)
    assert best[0] == 0.0


def test_jsw_sup_dominates_sampled_lambdas():
    rng = np.random.default_rng(11)
    fam = ScaleFamily(ScaleGrid(0, 2, 3), rng.standard_normal((40, 10)))
    best, arg = jsw_sup_rows(fam)
    for lam in np.linspace(0.01, 4, 60):
        assert np.all(jsw_ratio_rows(fam, lam) <= best + 1e-12)
    # the argmax lambda attains the sup
    for i in range(40):
        if best[i] > 0:
            assert jsw_comparison_ratio(fam, i, arg[i]) == pytest.approx(best[i], rel=1e-12)


def test_v2_ratio_linear():
    t = np.linspace(1, 2, 64)
    assert v2_interpolation_ratio(SeriesSample(t, t)) == pytest.approx((3 / 7) ** 0.25, rel=1e-3)


def test_v2_ratio_sine_limit():
    # best chain 0 -> 1 -> -1 -> 0 gives V_2^2 = 1 + 4 + 1 and the norms give sqrt(pi),
    # so the ratio tends to sqrt(6/pi), well above 1
    for n, tol in ((64, 2e-3), (512, 5e-5)):
        t = np.linspace(1, 2, n)
        r = v2_interpolation_ratio(SeriesSample(t, np.sin(2 * np.pi * t)))
        assert r == pytest.approx(math.sqrt(6 / math.pi), rel=tol)


def test_v2_ratio_constant_and_short():
    t = np.linspace(1, 2, 5)
    assert v2_interpolation_ratio(SeriesSample(t, np.ones(5))) == 0.0
    with pytest.raises(ValueError):
        v2_interpolation_ratio(SeriesSample(t[:2], t[:2]))


def test_series_sample_validation():
    with pytest.raises(ValueError):
        SeriesSample(np.array([1.0, 1.0]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        SeriesSample.of([1.0, np.nan])
