import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varjump import corpus
from varjump.experiments import spike_trace_cases
from varjump.grid import Grid, SampledFunction
from varjump.martingale import (DyadicLevel, cond_expectation, martingale_diff, phi_minus_e_square_function,
                                VectorField, cz_decompose, martingale_jump_ratio, top_level)


def _rand(grid, seed):
    return SampledFunction(grid, np.random.default_rng(seed).standard_normal(grid.shape))


def test_expectation_examples():
    g = Grid(1, 16)
    c = SampledFunction.constant(g, 3.0)
    assert np.allclose(cond_expectation(c, 2).values, 3.0)
    f = _rand(g, 0)
    assert np.array_equal(cond_expectation(f, 0).values, f.values)
    ind = np.zeros(16)
    ind[4] = 1.0
    e = cond_expectation(SampledFunction(g, ind), 1).values
    assert e[4] == e[5] == 0.5 and e.sum() == pytest.approx(1.0)
    assert np.allclose(cond_expectation(f, top_level(g)).values, f.values.mean())


@pytest.mark.parametrize("n", [1, 2])
def test_expectation_idempotent_and_nested(n):
    f = _rand(Grid(n, 16), 1)
    e2 = cond_expectation(f, 2)
    assert np.allclose(cond_expectation(e2, 2).values, e2.values, atol=1e-15)
    assert np.allclose(cond_expectation(cond_expectation(f, 1), 3).values, cond_expectation(f, 3).values)


def test_level_bounds():
    g = Grid(2, 16)
    with pytest.raises(ValueError):
        DyadicLevel(5, g)
    with pytest.raises(ValueError):
        martingale_diff(_rand(g, 2), 0)
    assert DyadicLevel(2, g).cube_count == 16


@pytest.mark.parametrize("n", [1, 2])
def test_telescoping_and_orthogonality(n):
    # levels grow coarser, so f = E_top f - sum_l (E_l f - E_{l-1} f)
    g = Grid(n, 32)
    f = _rand(g, 3)
    top = top_level(g)
    total = cond_expectation(f, top).values - sum(martingale_diff(f, l).values for l in range(1, top + 1))
    assert np.allclose(total, f.values, atol=1e-13)
    d = [martingale_diff(f, l).values for l in range(1, top + 1)]
    for a in range(len(d)):
        for b in range(a + 1, len(d)):
            assert abs(np.sum(d[a] * d[b])) < 1e-12 * g.size


def test_square_function_vanishes_on_constants():
    g = Grid(2, 32)
    for c in (0.0, 2.5):
        s = phi_minus_e_square_function(SampledFunction.constant(g, c))
        assert np.max(s.values) < 1e-10
    with pytest.raises(ValueError):
        phi_minus_e_square_function(SampledFunction.constant(g, 1.0), levels=(0, 9))


def test_cz_no_cubes_above_sup():
    g = Grid(2, 16)
    h = corpus.random_vector_field(g, np.random.default_rng(5))
    res = cz_decompose(h, float(h.norm_field().max()) * 1.01)
    assert res.cubes == [] and np.array_equal(res.good.values, h.values)


def test_cz_spike_traces():
    for h, alpha, cube, atom, good in spike_trace_cases():
        res = cz_decompose(h, alpha)
        assert res.cubes == [cube]
        assert np.array_equal(res.atoms[cube][0], atom)
        assert np.all(res.good.values[(0,) + res.cube_slices(cube)] == good)


def test_cz_errors():
    h = VectorField(Grid(1, 16), (0, 0), np.ones((1, 16)))
    with pytest.raises(ValueError):
        cz_decompose(h, 0.0)
    with pytest.raises(ValueError, match="global mean"):
        cz_decompose(h, 0.5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2]), st.floats(1.05, 4.0))
def test_cz_properties(seed, n, factor):
    g = Grid(n, 64 if n == 1 else 16)
    h = corpus.random_vector_field(g, np.random.default_rng(seed))
    alpha = float(h.norm_field().mean()) * factor
    res = cz_decompose(h, alpha)
    # good + bad reassembles h
    assert np.allclose(res.good.values + res.bad_field(), h.values, atol=1e-12)
    # cubes are disjoint
    count = np.zeros(g.shape, dtype=int)
    for c in res.cubes:
        count[res.cube_slices(c)] += 1
    assert count.max(initial=0) <= 1
    w = h.norm_field()
    for c in res.cubes:
        lv = c[0]
        m = w[res.cube_slices(c)].mean()
        assert alpha < m <= 2 ** n * alpha * (1 + 1e-12)
        # atoms have mean zero in each component
        assert np.allclose(res.atoms[c].reshape(h.values.shape[0], -1).mean(axis=1), 0, atol=1e-12)
    assert np.all(w[~res.covered()] <= alpha)
    measure = res.covered().sum() * g.cell
    assert measure <= h.l1_l2() / alpha * (1 + 1e-12)


def test_jump_ratio_edges():
    g = Grid(2, 16)
    assert martingale_jump_ratio(SampledFunction.constant(g, 2.0), 0.1, 2) == 0.0
    assert martingale_jump_ratio(_rand(g, 6), 1e6, 2) == 0.0
    with pytest.raises(ValueError):
        martingale_jump_ratio(_rand(g, 6), 0.0, 2)
    with pytest.raises(ValueError):
        martingale_jump_ratio(_rand(g, 6), 1.0, 1)
