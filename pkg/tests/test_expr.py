import math

import numpy as np
import pytest

from src.errors import PoleHit, Unknowable
from src.expr import (Const, FactorProduct, FactorProductDerivative, FactorProductSecondDerivative,
                      GroupedPartialFractions, Monomial, PowerCompose, Product, Quotient, Shift, Sum, Var, differentiate,
                      evaluate, evaluate_array, evaluate_mp, polynomial, registry, shift, to_complex)


def value(e, z):
    return to_complex(evaluate(e, z))


def test_polynomial_value():
    assert value(polynomial([1, 0, 1]), 2) == pytest.approx(5)


def test_exact_zero_of_a_sum_escalates():
    # z^2 + 1 at i cancels completely; the extended path returns an exact zero
    v = evaluate(polynomial([1, 0, 1]), 1j)
    assert v.is_zero


def test_derivative_of_a_cube():
    d = differentiate(Monomial(3))
    assert value(d, 2) == pytest.approx(12)


def test_quotient_rule():
    e = Quotient(Const(1), Var())
    assert value(differentiate(e), 2j) == pytest.approx(-1 / (2j) ** 2)


def test_constants_differentiate_to_zero():
    assert differentiate(Const(7)) == Const(0)
    assert differentiate(Sum((Const(1), Const(2)))) == Const(0)


def test_shift_identity_and_folding():
    e = Monomial(2)
    assert shift(e, 0) is e
    assert shift(Const(3), 5) == Const(3)
    assert shift(shift(e, 1), -1) == e
    folded = shift(shift(e, 1), 2)
    assert isinstance(folded, Shift) and folded.child == e
    assert value(folded, 0) == pytest.approx(9)


def test_operators_build_trees():
    z = Var()
    e = (z * z - 1) / (z + 2)
    assert value(e, 3) == pytest.approx(8 / 5)
    assert value(-z, 1j) == pytest.approx(-1j)


def test_quotient_at_a_pole():
    with pytest.raises(PoleHit):
        evaluate(Quotient(Const(1), Var()), 0)
    with pytest.raises(PoleHit):
        evaluate_mp(Quotient(Const(1), Var()), 0)


def test_partial_fractions_at_a_pole():
    with pytest.raises(PoleHit):
        evaluate(GroupedPartialFractions(((1, 1j),)), 1j)


def test_partial_fractions_value_and_derivative():
    e = GroupedPartialFractions(((2, 1), (3j, -1, 2)))
    z = 0.5 + 0.25j
    assert value(e, z) == pytest.approx(2 / (z - 1) + 3j / (z + 1) ** 2)
    assert value(differentiate(e), z) == pytest.approx(-2 / (z - 1) ** 2 - 6j / (z + 1) ** 3)


def test_partial_fractions_reject_repeated_poles():
    with pytest.raises(ValueError):
        GroupedPartialFractions(((1, 1), (2, 1)))


def test_factor_product_values():
    assert value(FactorProduct((4,)), 4) == pytest.approx(2)
    assert evaluate(FactorProduct((4,)), -4).logmag == -math.inf
    assert value(FactorProduct((4, 64)), 1j) == pytest.approx((1 + 1j / 4) * (1 + 1j / 64))


def test_factor_product_derivative_away_from_zeros():
    P = FactorProduct((4, 64))
    d = differentiate(P)
    assert isinstance(d, FactorProductDerivative)
    z = 3 - 2j
    assert value(d, z) == pytest.approx((1 / 4) * (1 + z / 64) + (1 / 64) * (1 + z / 4))


def test_factor_product_derivative_at_a_zero():
    d = differentiate(FactorProduct((4, 1024)))
    expected = (1 / 4) * (1 - 4 / 1024)
    assert value(d, -4) == pytest.approx(expected, rel=1e-12)
    assert complex(evaluate_mp(d, -4)) == pytest.approx(expected, rel=1e-15)


def test_factor_product_second_derivative():
    d2 = differentiate(differentiate(FactorProduct((4, 64))))
    assert value(d2, 1 + 1j) == pytest.approx(2 / (4 * 64))


def test_second_derivative_is_regular_at_zeros():
    # P = (1 + z)(1 + z/8)(1 + z/27): P''(-1) = 11/36, P''(-8) = 1/9
    d2 = differentiate(differentiate(FactorProduct((1, 8, 27))))
    assert isinstance(d2, FactorProductSecondDerivative)
    assert not d2.reg.poles()
    assert value(d2, -1) == pytest.approx(11 / 36, rel=1e-12)
    assert value(d2, -8) == pytest.approx(1 / 9, rel=1e-12)
    assert complex(evaluate_mp(d2, -1)) == pytest.approx(11 / 36, rel=1e-15)
    zs = np.array([-1, -8, -27, 2j, -3.5 + 0.25j])
    got = evaluate_array(d2, zs).to_complex()
    for z, v in zip(zs, got):
        assert v == pytest.approx(complex(evaluate_mp(d2, complex(z))), rel=1e-10)


def test_second_derivative_at_a_double_zero():
    # (1 + z/4)^2 has P'' = 1/8 everywhere
    d2 = differentiate(differentiate(FactorProduct((4, 4))))
    assert value(d2, -4) == pytest.approx(1 / 8, rel=1e-12)
    assert value(d2, 3 + 1j) == pytest.approx(1 / 8, rel=1e-10)
    assert complex(evaluate_mp(d2, 3 + 1j)) == pytest.approx(1 / 8, rel=1e-15)


def test_factor_product_without_double_overflow():
    a = tuple(float(k) ** 3 for k in range(1, 201))
    v = evaluate(FactorProduct(a), 1e8)
    assert v.logmag > 709
    assert np.isfinite(v.logmag)


def test_power_compose():
    e = PowerCompose(FactorProduct((4,)), 4)
    z = 0.5 + 1j
    assert value(e, z) == pytest.approx(1 + z ** 4 / 4)
    assert value(differentiate(e), z) == pytest.approx(z ** 3)
    zeros = registry(e, strict=True).zeros()
    assert len(zeros) == 4
    assert all(abs(abs(x.location) - math.sqrt(2)) < 1e-12 for x in zeros)


def test_sum_registry_is_unknowable_in_strict_mode():
    e = Var() + Const(1)
    with pytest.raises(Unknowable) as exc:
        registry(e, strict=True)
    assert exc.value.partial is not None
    assert not registry(e).complete


def test_evaluate_array_matches_pointwise():
    e = Quotient(polynomial([1, -2, 0, 1]), Shift(Var(), 3))
    zs = np.array([0.5, 1j, -2 + 1j, 10])
    arr = evaluate_array(e, zs).to_complex()
    for z, v in zip(zs, arr):
        assert v == pytest.approx((1 - 2 * z + z ** 3) / (z + 3))


def test_extended_path_agrees_with_double_path():
    e = Product((FactorProduct((4, 64)), GroupedPartialFractions(((1, 2j), (-1, -2j)))))
    z = 0.3 + 0.7j
    assert complex(evaluate_mp(e, z)) == pytest.approx(value(e, z), rel=1e-12)


def test_monomial_rejects_nonpositive_power():
    with pytest.raises(ValueError):
        Monomial(0)
