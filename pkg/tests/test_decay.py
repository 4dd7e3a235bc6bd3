import math

import numpy as np
import pytest

from varjump.decay import (radial_integral, nu_hat, decay_profile, fit_profile, piece_envelope, envelope_check,
                           one_dim_average_decay)
from varjump.operators import AnnulusMeasure
from varjump.sphere import sin_kernel, twolevel_kernel, hilbert_kernel, omega_decomposition, parse_kernel
from scipy.integrate import quad


def test_radial_integral_against_quad():
    for a in (0.0, 0.7, -3.0, 40.0):
        re = quad(lambda r: math.cos(a * r) / r, 1, 2, limit=200)[0]
        im = quad(lambda r: -math.sin(a * r) / r, 1, 2, limit=200)[0]
        assert radial_integral(np.array([a]), 1.0, 2.0)[0] == pytest.approx(complex(re, im), abs=1e-12)


def test_nu_hat_zero_frequency():
    for k in (sin_kernel(), twolevel_kernel()):
        assert abs(nu_hat(AnnulusMeasure(k, 0), [0.0, 0.0])) < 1e-12


def test_nu_hat_dilation():
    for k in (sin_kernel(), twolevel_kernel()):
        xi = np.array([0.3, 0.2])
        a = nu_hat(AnnulusMeasure(k, 3), xi)
        b = nu_hat(AnnulusMeasure(k, 0), 8 * xi)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


def test_nu_hat_refinement_oracle():
    m = AnnulusMeasure(sin_kernel(), 0)
    a = abs(nu_hat(m, [0.0, 1e3]))
    b = abs(nu_hat(m, [0.0, 1e3], refine=4))
    assert a == pytest.approx(b, rel=5e-3)
    m2 = AnnulusMeasure(twolevel_kernel(), 0)
    a = abs(nu_hat(m2, [30.0, 40.0]))
    b = abs(nu_hat(m2, [30.0, 40.0], refine=4))
    assert a == pytest.approx(b, rel=5e-3)


def test_nu_hat_1d_hilbert():
    # (1/pi) int_{1<|y|<=2} e^{-2 pi i xi y} dy / y = -(2i/pi) (Si(4 pi xi) - Si(2 pi xi))
    from scipy.special import sici
    xi = 0.37
    v = nu_hat(AnnulusMeasure(hilbert_kernel(), 0), [xi])
    ex = -2j / math.pi * (sici(4 * math.pi * xi)[0] - sici(2 * math.pi * xi)[0])
    assert v == pytest.approx(ex, abs=1e-13)


def test_small_frequency_slope():
    p = decay_profile(AnnulusMeasure(sin_kernel(), 0), math.pi / 2, (0, 6), "power", base=1e-4)
    assert p.exponent == pytest.approx(1.0, abs=0.01)


def test_decay_profile_errors():
    m = AnnulusMeasure(sin_kernel(), 0)
    with pytest.raises(ValueError):
        decay_profile(m, 0.0, (0, 3), "exp")
    with pytest.raises(ValueError):
        decay_profile(m, 0.0, (0, 30), "power")
    with pytest.raises(ValueError):
        fit_profile([(0, 1.0, 1.0)], "power")


def test_fit_profile_recovers_power():
    rows = [(k, 2.0 ** k, 3.0 * (2.0 ** k) ** -0.5) for k in range(8)]
    p = fit_profile(rows, "power")
    assert p.exponent == pytest.approx(-0.5) and p.residual < 1e-12


def test_envelope():
    rho = np.array([1e-3, 1.0, 1e3])
    assert np.allclose(piece_envelope(rho, 1), [1e-3, 1.0, 0.1])
    rows = [(k, 2.0 ** k, 2.0 * piece_envelope(2.0 ** k, 2)) for k in range(-6, 7)]
    C, worst, ok = envelope_check(rows, 2)
    assert C == pytest.approx(2.0) and worst == pytest.approx(1.0) and ok


def test_piece_envelope_check_passes():
    m, c, piece = omega_decomposition(twolevel_kernel()).pieces[0]
    meas = AnnulusMeasure(piece, 0)
    d = np.array([math.cos(0.3), math.sin(0.3)])
    rows = [(k, 2.0 ** k, abs(nu_hat(meas, 2.0 ** k * d))) for k in range(-8, 9, 2)]
    assert envelope_check(rows, m)[2]


def test_one_dim_average_decay():
    assert one_dim_average_decay(1, 0.5)[0] == pytest.approx(2 / math.pi, abs=1e-14)
    assert one_dim_average_decay(1, 1.0)[0] < 1e-14
    for n in (1, 2, 3):
        assert one_dim_average_decay(n, 1e-9)[0] == pytest.approx(1.0 / n, rel=1e-9)
    for x in (3.3, 17.5, 250.25):
        assert one_dim_average_decay(1, x)[0] == pytest.approx(abs(math.sin(math.pi * x) / (math.pi * x)), abs=1e-12)
    with pytest.raises(ValueError):
        one_dim_average_decay(0, 1.0)


def test_gs_kernel_log_decay():
    gs = parse_kernel("gs:alpha=2")
    p = decay_profile(AnnulusMeasure(gs, 0), 0.0, (10, 19), "logpower", base=1 / (2 * math.pi * 1.25))
    assert abs(p.exponent + 3.0) <= 0.3
