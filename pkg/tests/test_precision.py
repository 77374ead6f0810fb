import math
import threading

import mpmath
import pytest

from src.precision import (DEFAULT_BITS, format_complex, log_abs, lost_budget, mp_context, num,
                           parse_complex, to_double)


@pytest.mark.parametrize("text,expected", [
    ("2", 2),
    ("-1.5e3", -1500),
    ("0.5j", 0.5j),
    ("1+2j", 1 + 2j),
    ("1-2j", 1 - 2j),
    ("-3.25e-4-7j", -3.25e-4 - 7j),
    ("2e-3+1e+2j", 0.002 + 100j),
])
def test_parse_complex(text, expected):
    assert to_double(parse_complex(text)) == pytest.approx(expected)


def test_parse_complex_rejects_empty():
    with pytest.raises(ValueError):
        parse_complex("  ")


def test_format_complex_parses_back_to_the_same_literal():
    third = num(mpmath.mpf(1) / 3)
    for x in (third, num(0.5j), num(-2 + 7j), num(3)):
        assert parse_complex(format_complex(x)) == x


def test_format_complex_pure_imaginary():
    assert format_complex(num(0.5j)).endswith("j")
    assert "+" not in format_complex(num(0.5j))


def test_log_abs_beyond_double_range():
    huge = num(mpmath.mpf(10) ** 400)
    assert log_abs(huge) == pytest.approx(400 * math.log(10))
    assert log_abs(num(0)) == -math.inf


def test_lost_budget():
    assert lost_budget(53) == 0
    assert lost_budget(DEFAULT_BITS) == 45.0
    assert lost_budget(100) == pytest.approx(47 * math.log(2))


def test_mp_context_is_per_thread():
    main = mp_context(128)
    assert mp_context(128) is main
    assert main.prec == 128
    seen = []
    t = threading.Thread(target=lambda: seen.append(mp_context(128)))
    t.start()
    t.join()
    assert seen[0] is not main
    assert seen[0].prec == 128
