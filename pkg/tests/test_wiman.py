import math

import pytest

from src.corpus import exp_series
from src.errors import InsufficientGrid, PoleInDisk, WindowTooShort
from src.expr import FactorProduct, Quotient, Const, linear_factors
from src.wiman import (CentralIndexProfile, TaylorWindow, central_index_at, central_index_order,
                       max_term_central_index, n_power_ratio_trend, taylor_coeffs, wv_ratio_check)


def test_taylor_coefficients_of_a_finite_product():
    t = taylor_coeffs(FactorProduct((4, 64)), 4, 1.0)
    c = t.coeffs
    assert c[0] == pytest.approx(1)
    assert c[1] == pytest.approx(1 / 4 + 1 / 64)
    assert c[2] == pytest.approx(1 / 256)
    assert abs(c[3]) < 1e-12 and abs(c[4]) < 1e-12
    assert t.polynomial_value(0.5) == pytest.approx((1 + 0.5 / 4) * (1 + 0.5 / 64))


def test_taylor_coefficients_need_a_pole_free_disk():
    with pytest.raises(PoleInDisk):
        taylor_coeffs(Quotient(Const(1), linear_factors([2])), 8, 3.0)


def test_maximal_term_takes_the_largest_tied_index():
    coeffs = [1 / math.factorial(k) for k in range(20)]
    mu, n = max_term_central_index(TaylorWindow.from_coeffs(coeffs), 3.0)
    assert n == 3
    assert mu == pytest.approx(math.log(4.5))


def test_window_too_short():
    t = TaylorWindow(extraction_radius=1.0, log_abs=[0.0, math.log(2), math.log(4)], args=[0.0] * 3,
                     lost=[False] * 3, error_bound=0.1)
    with pytest.raises(WindowTooShort):
        max_term_central_index(t, 1.0)


def test_central_index_of_exp():
    f = exp_series(60)
    _, n, window = central_index_at(f, 5.0)
    assert n == 5
    assert window.m >= 7


def test_profile_helpers():
    p = CentralIndexProfile(r_grid=[10.0, 100.0, 1000.0], mu_vals=[1.0, 2.0, 4.0], N_vals=[1, 2, 3])
    assert p.monotone()
    assert p.log_mu_convex()
    ratios, decreasing = n_power_ratio_trend(p, 2)
    assert ratios == pytest.approx([4 / 100, 9 / 1000])
    assert decreasing
    with pytest.raises(InsufficientGrid):
        central_index_order(p)


def test_concave_log_mu_is_flagged():
    p = CentralIndexProfile(r_grid=[10.0, 100.0, 1000.0], mu_vals=[1.0, 3.0, 4.0], N_vals=[1, 1, 1])
    assert not p.log_mu_convex()


def test_derivative_ratio_for_exp():
    # z f'/f = z for exp, and N(r) = r at integer r
    res = wv_ratio_check(exp_series(60), 1, 20.0)
    assert res.central_index == 20
    assert res.deviation < 1e-6
    assert not res.flat
