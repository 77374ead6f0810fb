"""
Exceptional sets: unions of discs around zeros and poles (epsilon-sets), and
the radial sets of circle radii they induce.
"""
import math
from dataclasses import dataclass
from typing import Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from src.errors import DivergentEpsilonSum, IncompleteRegistry
from src.registry import PoleZeroRegistry
from util.log import Log

log = Log("epsilon")

Interval = Tuple[float, float]


def merge_intervals(intervals: Iterable[Interval]) -> List[Interval]:
    out: List[List[float]] = []
    for a, b in sorted((a, b) for a, b in intervals if b > a):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def clip_intervals(intervals: Iterable[Interval], lo: float, hi: float) -> List[Interval]:
    return [(max(a, lo), min(b, hi)) for a, b in intervals if min(b, hi) > max(a, lo)]


def complement(intervals: Sequence[Interval], lo: float, hi: float) -> List[Interval]:
    out, cursor = [], lo
    for a, b in merge_intervals(clip_intervals(intervals, lo, hi)):
        if a > cursor:
            out.append((cursor, a))
        cursor = max(cursor, b)
    if cursor < hi:
        out.append((cursor, hi))
    return out


@dataclass(frozen=True)
class EpsilonSet:
    discs: Tuple[Tuple[complex, float], ...] = ()
    rule: str = "exclusion"
    # sum of r_j/|b_j| over stored discs with b_j != 0
    ratio_sum: float = 0.0
    divergent: bool = False

    def contains(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        if not self.discs:
            return np.zeros(zs.shape, dtype=bool)
        centers = np.array([b for b, _ in self.discs], dtype=complex)
        radii = np.array([r for _, r in self.discs])
        return np.any(np.abs(zs[..., None] - centers) < radii, axis=-1)

    def shadows(self) -> List[Interval]:
        """Radii r whose circle |z| = r meets a disc."""
        return merge_intervals((max(abs(b) - r, 0.0), abs(b) + r) for b, r in self.discs)

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "ratio_sum": self.ratio_sum,
            "divergent": self.divergent,
            "discs": [[b.real, b.imag, r] for b, r in self.discs],
        }


def exponent_of_convergence(moduli: Sequence[float]) -> float:
    """Slope of log n(r) against log r over the outer half of the sorted nonzero moduli."""
    m = np.sort(np.asarray([x for x in moduli if x > 1.0]))
    if len(m) < 8 or m[-1] / m[0] < 4.0:
        return 0.0
    n = np.arange(1, len(m) + 1)
    half = len(m) // 2
    return float(np.polyfit(np.log(m[half:]), np.log(n[half:]), 1)[0])


def build_epsilon_set(reg: PoleZeroRegistry, radius_rule: Literal["exclusion", "gundersen"] = "exclusion",
                      h: float = 1.0, alpha: float = 4.0) -> EpsilonSet:
    """
    exclusion: B(a, 2h) around every registered point.
    gundersen: B(a, |a| / log|a|^(alpha+1)) around every registered point with |a| > e.
    """
    if radius_rule not in ("exclusion", "gundersen"):
        raise ValueError(f"unknown radius rule {radius_rule!r}")
    discs: List[Tuple[complex, float]] = []
    for e in reg.entries:
        a = e.location
        if radius_rule == "exclusion":
            discs.append((a, 2.0 * h))
        elif abs(a) > math.e:
            discs.append((a, abs(a) / math.log(abs(a)) ** (alpha + 1)))
    ratio = math.fsum(r / abs(b) for b, r in discs if b != 0)
    divergent = False
    if radius_rule == "exclusion":
        lam = exponent_of_convergence([abs(b) for b, _ in discs])
        if lam >= 0.95:
            divergent = True
            err = DivergentEpsilonSum(f"registry points grow with exponent {lam:.2f}; sum of 1/|a_k| diverges")
            log.warning(str(err), exponent=lam, discs=len(discs))
    return EpsilonSet(tuple(discs), radius_rule, ratio, divergent)


class RadialSet(BaseModel):
    """A set of radii in [lo, hi], held as a grid indicator and, when known, exact intervals."""
    r_grid: List[float] = Field(default_factory=list)
    indicator: List[bool] = Field(default_factory=list)
    intervals: Optional[List[Interval]] = None
    lo: float = 1.0
    hi: float = 1.0
    # log-spacing of the grid, the resolution of grid-only measures
    spacing: float = 0.0

    @classmethod
    def from_intervals(cls, intervals: Sequence[Interval], r_grid: Sequence[float], lo: float, hi: float) -> "RadialSet":
        ivs = merge_intervals(clip_intervals(intervals, lo, hi))
        grid = [float(r) for r in r_grid]
        ind = [any(a <= r <= b for a, b in ivs) for r in grid]
        return cls(r_grid=grid, indicator=ind, intervals=ivs, lo=lo, hi=hi, spacing=_spacing(grid))

    @classmethod
    def from_indicator(cls, r_grid: Sequence[float], indicator: Sequence[bool]) -> "RadialSet":
        grid = [float(r) for r in r_grid]
        return cls(r_grid=grid, indicator=[bool(x) for x in indicator], intervals=None,
                   lo=grid[0] if grid else 1.0, hi=grid[-1] if grid else 1.0, spacing=_spacing(grid))

    @property
    def exact(self) -> bool:
        return self.intervals is not None


def _spacing(grid: Sequence[float]) -> float:
    if len(grid) < 2:
        return 0.0
    return float(np.median(np.diff(np.log(grid))))


def log_measure(s: RadialSet, a: float, b: float) -> float:
    """Integral of dt/t over s within [a, b]."""
    if s.exact:
        return math.fsum(math.log(y / x) for x, y in clip_intervals(s.intervals or [], max(a, 1e-300), b))
    total = 0.0
    g = s.r_grid
    for i in range(len(g) - 1):
        x, y = max(g[i], a), min(g[i + 1], b)
        if y > x and s.indicator[i]:
            total += math.log(y / x)
    return total


def measure(s: RadialSet, a: float, b: float) -> float:
    if s.exact:
        return math.fsum(y - x for x, y in clip_intervals(s.intervals or [], a, b))
    total = 0.0
    g = s.r_grid
    for i in range(len(g) - 1):
        x, y = max(g[i], a), min(g[i + 1], b)
        if y > x and s.indicator[i]:
            total += y - x
    return total


def circle_exclusion(eps: EpsilonSet, r_grid: Sequence[float]) -> RadialSet:
    hi = max(r_grid) if len(r_grid) else 1.0
    return RadialSet.from_intervals(eps.shadows(), r_grid, 1.0, hi)


def circle_avoidance(eps: EpsilonSet, r_grid: Sequence[float]) -> RadialSet:
    """Radii in [1, max r_grid] whose circle meets no disc of eps."""
    hi = max(r_grid) if len(r_grid) else 1.0
    return RadialSet.from_intervals(complement(eps.shadows(), 1.0, hi), r_grid, 1.0, hi)


def log_density(s: RadialSet, r: float) -> Tuple[float, float]:
    """
    (lower, upper) logarithmic density up to r: the ratio log_measure(s, 1, t)/log t
    is taken at the grid radii t <= r in the upper half of that range, and its
    min and max stand in for liminf and limsup.
    """
    ts = [t for t in s.r_grid if 1.0 < t <= r]
    if not ts:
        return (0.0, 0.0)
    tail = ts[len(ts) // 2:]
    ratios = [min(max(log_measure(s, 1.0, t) / math.log(t), 0.0), 1.0) for t in tail]
    return (min(ratios), max(ratios))


def pole_coincidence_set(reg: PoleZeroRegistry, R: float) -> RadialSet:
    """Radii r in [R/2, R] with no pole modulus in (r - 1, r]."""
    if not reg.poles_exact:
        raise IncompleteRegistry("pole set is not exactly known")
    removed = [(s, s + 1.0) for s in reg.pole_moduli()]
    keep = complement(removed, R / 2.0, R)
    grid = list(np.linspace(R / 2.0, R, 65))
    return RadialSet.from_intervals(keep, grid, R / 2.0, R)
