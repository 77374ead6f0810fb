import math

import pytest
from pydantic import ValidationError

from src.errors import InsufficientGrid
from src.grid import GridSpec, angle_count, decile_medians, geometric_grid, log_spacing, require_decades, secant_order


def test_grid_spec():
    g = GridSpec(min=1, max=1000, points=4)
    assert list(g.radii()) == pytest.approx([1, 10, 100, 1000])
    assert list(GridSpec(min=0, max=3, points=4, geometric=False).radii()) == pytest.approx([0, 1, 2, 3])
    with pytest.raises(ValidationError):
        GridSpec(min=1, max=2, points=3, spacing="log")


def test_log_spacing():
    assert log_spacing(geometric_grid(1, 100, 3)) == pytest.approx(math.log(10))
    assert log_spacing([5.0]) == 0.0


def test_decile_medians():
    values = list(range(20))
    assert decile_medians(values) == (0.5, 18.5)
    assert decile_medians([3.0]) == (3.0, 3.0)
    lo, hi = decile_medians([])
    assert math.isnan(lo) and math.isnan(hi)


def test_require_decades():
    require_decades(geometric_grid(1, 1000, 16))
    with pytest.raises(InsufficientGrid):
        require_decades(geometric_grid(1, 1000, 8))
    with pytest.raises(InsufficientGrid):
        require_decades(geometric_grid(1, 100, 20))


def test_secant_order_of_a_power():
    r = geometric_grid(10, 1e4, 16)
    upper, lower, naive = secant_order(r, [x ** 0.5 for x in r])
    assert upper == pytest.approx(0.5)
    assert lower == pytest.approx(0.5)
    assert naive == pytest.approx(0.5)


def test_secant_order_needs_positive_values():
    with pytest.raises(InsufficientGrid):
        secant_order([1, 2, 3, 4], [0, 0, 0, 0])


def test_angle_count():
    assert angle_count(1) == 256
    assert angle_count(100) == 3200
    assert angle_count(1e9) == 2 ** 16
