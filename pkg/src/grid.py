"""Radius grids and the tail statistics that stand in for limits."""
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.errors import InsufficientGrid


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    min: float
    max: float
    points: int
    geometric: bool = True

    def radii(self) -> np.ndarray:
        if self.geometric:
            return np.geomspace(self.min, self.max, self.points)
        return np.linspace(self.min, self.max, self.points)


def geometric_grid(r_min: float, r_max: float, points: int) -> np.ndarray:
    return np.geomspace(r_min, r_max, points)


def log_spacing(r_grid: Sequence[float]) -> float:
    if len(r_grid) < 2:
        return 0.0
    return float(np.median(np.diff(np.log(np.asarray(r_grid, dtype=float)))))


def decile_medians(values: Sequence[float]) -> Tuple[float, float]:
    """Median of the first and of the last tenth (at least one point each)."""
    v = np.asarray(values, dtype=float)
    if not len(v):
        return (math.nan, math.nan)
    k = max(1, int(math.ceil(len(v) / 10)))
    return (float(np.median(v[:k])), float(np.median(v[-k:])))


def require_decades(r_grid: Sequence[float], points: int = 16, decades: float = 3.0):
    if len(r_grid) < points:
        raise InsufficientGrid(f"{len(r_grid)} radii, need at least {points}")
    span = math.log10(max(r_grid) / min(r_grid))
    if span < decades - 1e-9:
        raise InsufficientGrid(f"grid spans {span:.2f} decades, need {decades}")


def secant_order(r_grid: Sequence[float], values: Sequence[float],
                 window: Optional[int] = None) -> Tuple[float, float, float]:
    """
    Growth exponent of positive `values` along the grid.

    Returns (upper, lower, naive): extremes over the top half of the grid of the
    log-log secant slope log(v_i/v_{i-w}) / log(r_i/r_{i-w}), and the plain
    max of log v/log r over the same range.
    """
    r = np.asarray(r_grid, dtype=float)
    v = np.asarray(values, dtype=float)
    n = len(r)
    w = window or max(1, n // 4)
    slopes, naive = [], []
    for i in range(n // 2, n):
        if v[i] > 0 and r[i] > 1:
            naive.append(math.log(v[i]) / math.log(r[i]))
        j = i - w
        if j >= 0 and v[i] > 0 and v[j] > 0:
            slopes.append(math.log(v[i] / v[j]) / math.log(r[i] / r[j]))
    if not slopes:
        raise InsufficientGrid("no positive values to estimate growth from")
    return (max(slopes), min(slopes), max(naive) if naive else math.nan)


def angle_count(r: float, cap: int = 2 ** 16) -> int:
    """max(256, ceil(32 r)) equally spaced angles, capped."""
    return int(min(cap, max(256, math.ceil(32 * r))))
