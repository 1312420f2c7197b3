import math

import numpy as np
import pytest
from scipy import integrate, special

from pvextremes import constants as cn
from pvextremes.errors import AlphaOutOfRange, NegativeThreshold


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def test_unit_ball_volume():
    assert rel(cn.unit_ball_volume(2), math.pi) < 1e-15
    assert rel(cn.unit_ball_volume(3), 4 * math.pi / 3) < 1e-15
    assert rel(cn.unit_ball_volume(4), math.pi**2 / 2) < 1e-15


def test_dim_validation():
    with pytest.raises(ValueError):
        cn.unit_ball_volume(1)
    with pytest.raises(ValueError):
        cn.unit_ball_volume(13)
    with pytest.raises(TypeError):
        cn.unit_ball_volume(2.0)


def test_c_d_values():
    assert rel(cn.c_d(2), 1 / math.pi) < 1e-14
    assert rel(cn.c_d(3), math.pi / 64) < 1e-14
    # frozen from the closed form, cross-checked by MC in the acceptance suite
    assert rel(cn.c_d(4), 5.003515241596925e-3) < 1e-12


def test_c_d_recursion():
    for d in range(3, 11):
        assert rel(cn.c_d(d), cn.c_d_recursion_step(d) * cn.c_d(d - 1)) < 1e-10


def test_k_d_alpha_values():
    assert rel(cn.k_d_alpha(2, 0.0), math.pi) < 1e-13
    assert rel(cn.k_d_alpha(2, -1.0), 4.0) < 1e-13
    assert rel(cn.k_d_alpha(2, 1.0), 32.0 / 9.0) < 1e-13
    assert rel(cn.k_d_alpha(3, 1.0), 8 * math.pi / 5) < 1e-13


def test_alpha_zero_reductions():
    for d in range(2, 7):
        assert rel(cn.c_d_alpha(d, 0.0), cn.c_d(d)) < 1e-12
        assert rel(cn.k_d_alpha(d, 0.0), cn.unit_ball_volume(d)) < 1e-12


def test_c_d_alpha_values():
    # 2/pi^2 and 64/(9 pi^2), frozen from the closed form
    assert rel(cn.c_d_alpha(2, -1.0), 2 / math.pi**2) < 1e-13
    assert rel(cn.c_d_alpha(2, 1.0), 64 / (9 * math.pi**2)) < 1e-13
    assert rel(cn.c_d_alpha(3, 1.0), 0.14486636597875638) < 1e-12


def test_alpha_out_of_range():
    with pytest.raises(AlphaOutOfRange):
        cn.k_d_alpha(2, -2.0)
    with pytest.raises(AlphaOutOfRange):
        cn.c_d_alpha(3, -3.0)
    with pytest.raises(AlphaOutOfRange):
        cn.expected_pointy_count(2, -2.5, 1.0)


def test_upper_incomplete_gamma():
    assert rel(cn.upper_incomplete_gamma_int(1, 2.0), math.exp(-2)) < 1e-14
    assert rel(cn.upper_incomplete_gamma_int(2, 1.0), 2 / math.e) < 1e-14
    assert cn.upper_incomplete_gamma_int(3, 0.0) == 2.0
    with pytest.raises(ValueError):
        cn.upper_incomplete_gamma_int(0, 1.0)
    with pytest.raises(ValueError):
        cn.upper_incomplete_gamma_int(2, -0.5)


def test_upper_incomplete_gamma_against_scipy():
    for s in (1, 2, 3, 5, 8, 12):
        for x in (0.0, 0.3, 1.0, 4.7, 25.0, 120.0):
            mine = cn.upper_incomplete_gamma_int(s, x)
            ref = float(special.gammaincc(s, x)) * math.gamma(s)
            assert abs(mine - ref) <= 1e-12 * max(1.0, ref)


def test_expected_pointy_count_values():
    assert rel(cn.expected_pointy_count(2, 0.0, 0.0), 4.0) < 1e-13
    assert rel(cn.expected_pointy_count(2, 0.0, 1.0),
               (4 + 4 * math.pi) * math.exp(-math.pi)) < 1e-13
    assert rel(cn.expected_pointy_count(3, 0.0, 0.0), 9 * math.pi**2 / 8) < 1e-13
    # alpha = 1 values frozen after the incomplete-gamma reduction check
    assert rel(cn.expected_pointy_count(2, 1.0, 0.0), 3 * math.pi / 2) < 1e-12
    assert rel(cn.expected_pointy_count(2, 1.0, 1.0), 0.6132313106408548) < 1e-12
    with pytest.raises(NegativeThreshold):
        cn.expected_pointy_count(2, 0.0, -1.0)


def test_expected_count_matches_finite_sum():
    # the incomplete-gamma form reproduces the alpha = 0 finite sum term by term
    for d in (2, 3, 4):
        kd = cn.unit_ball_volume(d)
        for t in (0.0, 0.5, 1.0, 2.0):
            direct = ((d * kd) ** d * cn.c_d(d) * math.exp(-kd * t**d)
                      * sum(t ** (d * i) * kd ** (i - d + 1)
                            * math.factorial(d - 1) / math.factorial(i)
                            for i in range(d)))
            assert rel(cn.expected_pointy_count(d, 0.0, t), direct) < 1e-12


def test_expected_count_matches_quadrature():
    # independent oracle: numerical integration of the radial integral
    for d, a, t in ((2, 0.0, 1.0), (2, 1.0, 0.8), (3, -0.5, 1.1)):
        K = cn.k_d_alpha(d, a)
        pref = (d * cn.unit_ball_volume(d)) ** (d + 1) * cn.c_d_alpha(d, a)
        val, _ = integrate.quad(
            lambda r: r ** (d * d + d * a - 1) * math.exp(-K * r ** (d + a)),
            t, np.inf)
        assert rel(pref * val, cn.expected_pointy_count(d, a, t)) < 1e-9


def test_expected_count_strictly_decreasing():
    for d in (2, 3):
        for a in (0.0, 1.0):
            grid = np.linspace(1.0, 3.5, 40)
            vals = [cn.expected_pointy_count(d, a, t) for t in grid]
            assert all(x > y for x, y in zip(vals, vals[1:]))


def test_tail_asymptotic_values():
    assert rel(cn.tail_asymptotic(2, 0.0, 1.5),
               4 * math.pi * 1.5**2 * math.exp(-math.pi * 1.5**2)) < 1e-13
    assert rel(cn.tail_asymptotic(2, 0.0, 2.0),
               16 * math.pi * math.exp(-4 * math.pi)) < 1e-13
    with pytest.raises(NegativeThreshold):
        cn.tail_asymptotic(2, 0.0, 0.0)


def test_tail_is_leading_term_of_expected_count():
    # at any t the asymptotic equals the top term of the finite sum
    for d, a in ((2, 0.0), (3, 0.0), (2, 1.5), (3, -0.5)):
        K = cn.k_d_alpha(d, a)
        for t in (0.7, 1.3, 2.2):
            x = K * t ** (d + a)
            top = (math.exp((d + 1) * math.log(d * cn.unit_ball_volume(d))
                            + math.log(cn.c_d_alpha(d, a))
                            - math.log(d + a) - d * math.log(K))
                   * x ** (d - 1) * math.exp(-x))
            assert rel(top, cn.tail_asymptotic(d, a, t)) < 1e-12


def test_tail_prefactor_identity():
    for d in (2, 3):
        for a in (-1.0, -0.5, 0.0, 1.0, 2.0):
            lead = ((d * cn.unit_ball_volume(d)) ** (d + 1) * cn.c_d_alpha(d, a)
                    / (cn.k_d_alpha(d, a) * (d + a)))
            assert rel(lead, cn.tail_prefactor_explicit(d, a)) < 1e-9


def test_extremal_norm_constants():
    a1, a1p, theta = cn.extremal_norm_constants(2)
    assert rel(a1, 1.0) < 1e-13 and rel(a1p, 4.0) < 1e-13 and rel(theta, 0.25) < 1e-13
    a1, a1p, theta = cn.extremal_norm_constants(3)
    assert rel(a1, 3 * math.pi**2 / 32) < 1e-13
    assert rel(a1p, 9 * math.pi**2 / 16) < 1e-13
    assert rel(theta, 1 / 6) < 1e-13
    for d in range(2, 9):
        assert abs(cn.extremal_norm_constants(d)[2] - 1 / (2 * d)) < 1e-12


def test_miles_and_wendel():
    assert rel(cn.miles_mean_simplex_volume(2), 3 / (2 * math.pi)) < 1e-13
    assert rel(cn.miles_mean_simplex_volume(3), 0.1196797201367541) < 1e-12
    assert cn.wendel_probability(2) == 0.5
    assert cn.wendel_probability(3) == 0.25
    assert cn.wendel_probability(5) == 0.0625


def test_conditional_mean_ratio():
    for d in range(2, 13):
        ratio = cn.conditional_mean_ratio(d)
        assert ratio >= 1.0
        expected = cn.c_d(d) / (cn.wendel_probability(d)
                                * cn.miles_mean_simplex_volume(d))
        assert rel(ratio, expected) < 1e-11


def test_large_dimension_stays_finite():
    for d in (10, 11, 12):
        for f in (cn.c_d, cn.miles_mean_simplex_volume, cn.unit_ball_volume):
            v = f(d)
            assert math.isfinite(v) and v > 0
        assert math.isfinite(cn.expected_pointy_count(d, 0.0, 1.5))
