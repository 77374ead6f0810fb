from src.expr import (Const, FactorProduct, GroupedPartialFractions, Product, Quotient, Var, linear_factors,
                      registry, shift)
from src.registry import PoleZeroRegistry


def test_coincident_zero_and_pole_cancel():
    reg = PoleZeroRegistry.build(zeros=[(1 + 0j, 2)], poles=[(1 + 0j, 1)])
    assert len(reg.entries) == 1
    (e,) = reg.entries
    assert e.kind == "zero" and e.multiplicity == 1


def test_nearby_entries_merge():
    reg = PoleZeroRegistry.build(zeros=[(1 + 0j, 1), (1 + 1e-14 + 0j, 1)])
    assert [e.multiplicity for e in reg.zeros()] == [2]


def test_entries_sorted_by_modulus():
    reg = PoleZeroRegistry.build(zeros=[(5 + 0j, 1), (-1 + 0j, 1)], poles=[(2j, 1)])
    assert [e.modulus for e in reg.entries] == [1.0, 2.0, 5.0]


def test_counting_and_translation():
    reg = PoleZeroRegistry.build(zeros=[(-4 + 0j, 1), (-64 + 0j, 1)], poles=[(3 + 0j, 2)])
    assert reg.count_inside(10, "zero") == 1
    assert reg.count_inside(10, "pole") == 2
    assert reg.net_inside(lambda z: abs(z) < 10) == -1
    moved = reg.translate(4)
    assert moved.count_inside(1, "zero") == 1
    assert moved.nearest(7.1 + 0j).location == 7 + 0j


def test_factor_product_registry_is_complete():
    reg = registry(FactorProduct((4, 64)), strict=True)
    assert [e.location for e in reg.zeros()] == [-4 + 0j, -64 + 0j]
    assert reg.complete


def test_quotient_registry():
    reg = registry(Quotient(Var(), FactorProduct((4,))))
    assert [(e.location, e.kind) for e in reg.entries] == [(0j, "zero"), (-4 + 0j, "pole")]
    assert reg.complete and reg.poles_exact


def test_single_partial_fraction_is_complete():
    reg = registry(GroupedPartialFractions(((1, 2j),)))
    assert reg.complete
    assert reg.pole_moduli() == [2.0]


def test_product_with_one_incomplete_factor_keeps_exact_poles():
    gpf = GroupedPartialFractions(((1, 1), (1, -1)))
    reg = registry(Product((gpf, Var())))
    assert not reg.complete
    assert reg.poles_exact
    assert reg.count_inside(2, "pole") == 2


def test_two_incomplete_factors_lose_pole_exactness():
    a = GroupedPartialFractions(((1, 1), (1, -1)))
    b = GroupedPartialFractions(((1, 2), (1, -2)))
    assert not registry(Product((a, b))).poles_exact


def test_sum_with_overlapping_poles_is_not_exact():
    a = Quotient(Const(1), shift(Var(), -1))
    b = Quotient(Const(2), shift(Var(), -1))
    reg = registry(a + b)
    assert not reg.complete
    assert not reg.poles_exact
    assert [e.location for e in reg.poles()] == [1 + 0j]


def test_sum_with_distinct_poles_is_exact():
    reg = registry(Quotient(Const(1), shift(Var(), -1)) + Quotient(Const(1), shift(Var(), 1)))
    assert reg.poles_exact
    assert len(reg.poles()) == 2


def test_linear_factors_multiplicities():
    reg = registry(linear_factors([1, 2j], [3, 1]), strict=True)
    assert {(e.location, e.multiplicity) for e in reg.zeros()} == {(1 + 0j, 3), (2j, 1)}
