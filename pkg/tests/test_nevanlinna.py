import math

import pytest

from src.corpus import order_third_product
from src.errors import IncompleteRegistry, NoZeros, PoleOnCircle, PreconditionViolation
from src.expr import Const, FactorProduct, Monomial, Quotient, Var, linear_factors, registry
from src.grid import geometric_grid
from src.nevanlinna import (admissible_radius, arc_profile, arc_theta, characteristic, counting_integrated,
                            counting_number, growth_profile, keldysh_check, logderiv_bound_check, logderiv_bound_profile,
                            miles_rossi_bound, miles_rossi_measure, proximity)


def test_proximity_of_the_identity():
    assert proximity(Var(), math.e) == pytest.approx(1.0)
    assert proximity(Var(), 0.5) == pytest.approx(0.0)


def test_proximity_by_jensen():
    # |z - 1| >= 1 on |z| = 2, so log+ is log and the mean is log 2
    assert proximity(linear_factors([1]), 2.0) == pytest.approx(math.log(2), abs=1e-8)


def test_proximity_rejects_pole_on_circle():
    with pytest.raises(PoleOnCircle):
        proximity(Quotient(Const(1), linear_factors([2])), 2.0)


def test_counting_functions():
    reg = registry(FactorProduct((4, 64)))
    assert counting_number(reg, 10, "zero") == 1
    assert counting_number(reg, 64, "zero") == 2
    assert counting_integrated(reg, 10, "zero") == pytest.approx(math.log(10 / 4))
    assert counting_integrated(registry(Monomial(2)), 5, "zero") == pytest.approx(2 * math.log(5))


def test_counting_needs_known_points():
    with pytest.raises(IncompleteRegistry):
        counting_number(registry(Var() + 1), 10, "zero")


def test_characteristic_of_a_simple_pole():
    # 1/|z-1| <= 1 on |z| = 2, so T is the counting part alone
    assert characteristic(Quotient(Const(1), linear_factors([1])), 2.0) == pytest.approx(math.log(2), abs=1e-6)


def test_admissible_radius():
    reg = registry(linear_factors([10]))
    assert admissible_radius(reg, 5.0) == 5.0
    moved = admissible_radius(reg, 10.0)
    assert moved != 10.0
    assert abs(moved - 10.0) <= 0.2 + 1e-12


def test_growth_profile_of_an_order_third_product():
    p = growth_profile(order_third_product(200), geometric_grid(10, 1e4, 16))
    assert p.monotone
    assert 0.25 <= p.order_est <= 0.45
    assert p.lower_order_est <= p.order_est


def test_keldysh_sums_of_decaying_functions():
    f = Quotient(Const(1), Var())
    g = Quotient(Const(1), Monomial(2))
    res = keldysh_check(f, g, [2.0, 4.0, 8.0])
    assert res.sums == pytest.approx([0.0, 0.0, 0.0])
    assert res.final == pytest.approx(0.0)


def test_logderiv_bound_on_a_polynomial():
    g = linear_factors([1, 2])
    res = logderiv_bound_check(g, 10.0, 2.0)
    assert res.d_beta == 0.0
    assert res.T_beta_r > 0
    with pytest.raises(PreconditionViolation):
        logderiv_bound_check(g, 10.0, 1.0)


def test_logderiv_bound_needs_the_characteristic_without_near_zeros():
    # no zero inside 2r: the whole of |g'/g| = 1/|z + 1000| is charged to T(2r)
    res = logderiv_bound_check(FactorProduct((1000.0,)), 10.0, 2.0)
    assert res.T_beta_r == pytest.approx(20 / (1000 * math.pi), rel=0.05)
    assert res.d_beta == pytest.approx(10 / (990 * res.T_beta_r), rel=1e-6)


def test_logderiv_profile_flags_a_growing_margin():
    prof = logderiv_bound_profile(linear_factors([2500]), [10.0, 20.0, 1000.0, 1200.0], 2.0)
    assert prof.positive == 4
    assert prof.bottom_max == pytest.approx(20 / (2480 * math.log(2500)), rel=1e-3)
    assert prof.top_max == pytest.approx(1200 / (1300 * math.log(2500)), rel=1e-3)
    assert not prof.bounded


def test_miles_rossi_on_a_monomial():
    res = miles_rossi_measure(Monomial(5), 2.0, 0.5, samples=1024)
    assert res.zeros == 5
    assert res.measure == pytest.approx(2 * math.pi)


def test_miles_rossi_preconditions():
    with pytest.raises(PreconditionViolation):
        miles_rossi_measure(Monomial(2), 2.0, 1.5)
    with pytest.raises(PreconditionViolation):
        miles_rossi_measure(Quotient(Const(1), Var()), 2.0, 0.5)
    with pytest.raises(NoZeros):
        miles_rossi_measure(linear_factors([10]), 5.0, 0.5)


def test_miles_rossi_bound():
    assert miles_rossi_bound(0.5, 1.0, 1.0) == pytest.approx((0.5 / 14) ** 2)


def test_longest_arc_of_a_linear_factor():
    # |1 + z/4| > 1 on |z| = 2 exactly where Re z > -1/2
    theta, flag = arc_theta(FactorProduct((4,)), 2.0)
    assert not flag
    assert theta == pytest.approx(2 * math.acos(-0.25), abs=1e-3)


def test_arc_profile_resolves_edges_to_two_pi_over_a_million():
    prof = arc_profile(FactorProduct((4,)), geometric_grid(2, 1000, 12), tau=0.5, rho=0.25)
    assert prof.resolution == pytest.approx(2 * math.pi / 2 ** 20)
    assert prof.theta[0] == pytest.approx(2 * math.acos(-0.25), abs=4 * prof.resolution)


def test_arc_of_a_large_constant():
    theta, flag = arc_theta(Const(2), 3.0)
    assert flag and theta == 2 * math.pi
    prof = arc_profile(Const(2), geometric_grid(2, 1000, 12), tau=0.5, rho=0.25)
    assert all(prof.min_modulus_above_one)
    assert prof.holds
