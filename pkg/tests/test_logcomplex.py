import math

import numpy as np
import pytest

from src.errors import Overflow
from src.logcomplex import (LogArray, LogComplex, log_sum, neumaier, relative_deviation,
                            relative_deviation_array, to_complex, wrap)
from src.precision import ESCALATION_NATS


def test_round_trip_through_log_form():
    z = -3 + 4j
    v = LogComplex.from_complex(z)
    assert v.logmag == pytest.approx(math.log(5))
    assert to_complex(v) == pytest.approx(z)


def test_zero_is_minus_infinity():
    v = LogComplex.from_complex(0j)
    assert v.is_zero
    assert v.arg == 0.0
    assert to_complex(v) == 0j


def test_products_do_not_overflow():
    big = LogComplex(800.0, 0.5)
    sq = big * big
    assert sq.logmag == 1600.0
    assert sq.arg == pytest.approx(1.0)
    with pytest.raises(Overflow) as exc:
        to_complex(sq)
    assert exc.value.indicator.real == math.inf


def test_arg_is_wrapped():
    v = LogComplex(0.0, 3 * math.pi / 2)
    assert v.arg == pytest.approx(-math.pi / 2)
    assert wrap(np.array([-math.pi]))[0] == pytest.approx(math.pi)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        LogComplex(1.0) / LogComplex.zero()


def test_relative_deviation_edge_cases():
    z = LogComplex.zero()
    one = LogComplex(0.0)
    assert relative_deviation(z, z) == 0.0
    assert relative_deviation(one, z) == math.inf
    assert relative_deviation(z, one) == 1.0


def test_relative_deviation_of_huge_values():
    a = LogComplex(1000.0, 0.1)
    b = LogComplex(1000.0 + 1e-9, 0.1)
    assert relative_deviation(a, a) == 0.0
    assert relative_deviation(a, b) == pytest.approx(1e-9, rel=1e-3)


def test_relative_deviation_array_matches_scalar():
    a = LogArray.from_complex(np.array([1 + 1j, 2, 0]))
    b = LogArray.from_complex(np.array([1 + 1.001j, 2, 0]))
    dev = relative_deviation_array(a, b)
    for i in range(3):
        assert dev[i] == pytest.approx(relative_deviation(a[i], b[i]), abs=1e-15)


def test_neumaier_keeps_small_terms():
    terms = np.array([[1e16], [1.0], [-1e16]])
    assert neumaier(terms)[0] == 1.0


def test_log_sum_reports_cancellation():
    logmags = np.array([[0.0, 0.0], [0.0, math.log(2)]])
    args = np.array([[0.0, 0.0], [math.pi, 0.0]])
    logmag, arg, loss = log_sum(logmags, args)
    assert loss[0] > ESCALATION_NATS
    assert logmag[1] == pytest.approx(math.log(3))
    assert loss[1] == 0.0


def test_log_sum_of_zeros():
    logmag, _, loss = log_sum(np.full((2, 1), -np.inf), np.zeros((2, 1)))
    assert logmag[0] == -np.inf
    assert loss[0] == 0.0


def test_array_product_and_reciprocal():
    a = LogArray.from_complex(np.array([2j, 0]))
    b = LogArray.from_complex(np.array([3, 5]))
    p = (a * b).to_complex()
    assert p[0] == pytest.approx(6j)
    assert p[1] == 0
    assert b.reciprocal().to_complex()[1] == pytest.approx(0.2)
