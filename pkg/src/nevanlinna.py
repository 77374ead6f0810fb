"""
Nevanlinna functionals on circles |z| = r: proximity m, counting n and N,
characteristic T, order estimates, and the circle statistics built on them
(Keldysh sums, logarithmic-derivative bounds, Miles-Rossi angular measure,
longest arcs of |H| > 1).
"""
import csv
import math
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from src.epsilon import RadialSet, log_density
from src.errors import (IncompleteRegistry, InsufficientGrid, NoAdmissibleRadius, NonConvergent, NoZeros, PoleOnCircle,
                        PreconditionViolation, ZeroOnCircle)
from src.expr import FunctionExpr, differentiate, evaluate_array
from src.grid import angle_count, decile_medians, log_spacing, require_decades, secant_order
from src.registry import PoleZeroRegistry
from util.log import Log
from util.pool import parallel_map

log = Log("nevanlinna")

# h(9/2) closing the bound chain for the small constant of the one-zero theorem
DELTA0_REFERENCE = 1.0 / (23814.0 * math.pi)


def circle_points(r: float, n: int, offset: float = 0.0) -> np.ndarray:
    theta = 2.0 * np.pi * (np.arange(n) + offset) / n
    return r * np.exp(1j * theta)


def _guard_circle(reg: PoleZeroRegistry, r: float, margin: float, kind: Optional[str] = None):
    for e in reg.entries:
        if kind and e.kind != kind:
            continue
        if abs(e.modulus - r) <= margin:
            if e.kind == "pole":
                raise PoleOnCircle(r, e.location)
            raise ZeroOnCircle(r, e.location)


def admissible_radius(reg: PoleZeroRegistry, r: float, window: float = 0.02, candidates: int = 401,
                      clearance: float = 1e-3) -> float:
    """
    r itself when every registered modulus is at least clearance*r away,
    otherwise the radius within +-window*r farthest from all registered moduli.
    """
    moduli = np.array([e.modulus for e in reg.entries])
    if not len(moduli) or np.min(np.abs(moduli - r)) >= clearance * r:
        return float(r)
    grid = r * (1.0 + np.linspace(-window, window, candidates))
    gaps = np.min(np.abs(grid[:, None] - moduli[None, :]), axis=1)
    best = float(np.max(gaps))
    if best <= 1e-9 * r:
        raise NoAdmissibleRadius(r)
    # among equally good candidates, the one closest to r
    choice = grid[np.flatnonzero(gaps >= best * (1 - 1e-12))]
    chosen = float(choice[np.argmin(np.abs(choice - r))])
    log.debug("radius perturbed away from registered moduli", requested=float(r), chosen=chosen, gap=best)
    return chosen


def proximity(f: FunctionExpr, r: float, tol: float = 1e-9, max_points: int = 2 ** 16,
              start: int = 64) -> float:
    """m(r, f): circle mean of log+|f| by the periodic trapezoid rule with point doubling."""
    _guard_circle(f.reg, r, 1e-9 * r, kind="pole")
    n = start
    vals = np.maximum(evaluate_array(f, circle_points(r, n)).logmag, 0.0)
    total = float(np.sum(vals))
    prev, est = math.nan, total / n
    while 2 * n <= max_points:
        mid = np.maximum(evaluate_array(f, circle_points(r, n, 0.5)).logmag, 0.0)
        total += float(np.sum(mid))
        n *= 2
        prev, est = est, total / n
        if abs(est - prev) < tol:
            return est
    raise NonConvergent(f"proximity at r={r} did not settle to {tol}", (prev, est))


def proximity_estimate(f: FunctionExpr, r: float, tol: float = 1e-6) -> Tuple[float, bool]:
    """proximity(), falling back to the last estimate when the tolerance is not met."""
    try:
        return proximity(f, r, tol), True
    except NonConvergent as e:
        log.warning("proximity not converged, using last estimate", r=float(r), last=list(e.last))
        return e.last[1], False


def counting_number(reg: PoleZeroRegistry, r: float, kind: Literal["zero", "pole"]) -> int:
    """n(r, .): points of the given kind in |z| <= r, with multiplicity."""
    _require(reg, kind)
    return sum(e.multiplicity for e in reg.of_kind(kind) if e.modulus <= r)


def counting_integrated(reg: PoleZeroRegistry, r: float, kind: Literal["zero", "pole"]) -> float:
    """N(r) = sum over 0 < |a| <= r of mult log(r/|a|) + n(0) log r."""
    _require(reg, kind)
    terms = []
    for e in reg.of_kind(kind):
        if e.modulus > r:
            continue
        if e.modulus == 0:
            terms.append(e.multiplicity * math.log(r))
        else:
            terms.append(e.multiplicity * math.log(r / e.modulus))
    return math.fsum(terms)


def _require(reg: PoleZeroRegistry, kind: str):
    if kind == "pole" and not reg.poles_exact:
        raise IncompleteRegistry("pole set is not exactly known")
    if kind == "zero" and not reg.complete:
        raise IncompleteRegistry("zero set is not known")


def characteristic(f: FunctionExpr, r: float, tol: float = 1e-6) -> float:
    """T(r, f) = m(r, f) + N(r, f)."""
    m, _ = proximity_estimate(f, r, tol)
    return m + counting_integrated(f.reg, r, "pole")


class GrowthProfile(BaseModel):
    r_grid: List[float]
    m_vals: List[float]
    N_vals: List[float]
    T_vals: List[float]
    order_est: float = math.nan
    lower_order_est: float = math.nan
    # max log T / log r over the top half, kept for reference
    naive_order: float = math.nan
    spacing: float = 0.0
    monotone: bool = True

    def to_csv(self, path: str):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "m", "N", "T"])
            for row in zip(self.r_grid, self.m_vals, self.N_vals, self.T_vals):
                w.writerow([repr(float(x)) for x in row])


def growth_profile(f: FunctionExpr, r_grid: Sequence[float], tol: float = 1e-6) -> GrowthProfile:
    reg = f.reg
    with log.trace("growth_profile", points=len(r_grid)):
        radii = [admissible_radius(reg, float(r)) for r in r_grid]

        def one(r: float) -> Tuple[float, float]:
            m, _ = proximity_estimate(f, r, tol)
            return m, counting_integrated(reg, r, "pole")

        rows = parallel_map(one, radii)
    m_vals = [m for m, _ in rows]
    N_vals = [n for _, n in rows]
    T_vals = [m + n for m, n in rows]
    monotone = all(b >= a - 1e-6 for a, b in zip(T_vals, T_vals[1:]))
    profile = GrowthProfile(r_grid=radii, m_vals=m_vals, N_vals=N_vals, T_vals=T_vals,
                            spacing=log_spacing(radii), monotone=monotone)
    try:
        order, lower = order_estimate(profile)
        profile.order_est, profile.lower_order_est = order, lower
        profile.naive_order = secant_order(radii, T_vals)[2]
    except InsufficientGrid:
        pass
    return profile


def order_estimate(p: GrowthProfile) -> Tuple[float, float]:
    """(order, lower order) from secant slopes of log T against log r over the top half of the grid."""
    require_decades(p.r_grid)
    upper, lower, _ = secant_order(p.r_grid, p.T_vals)
    return upper, min(lower, upper)


class KeldyshResult(BaseModel):
    r_grid: List[float]
    sums: List[float]
    bottom_median: float
    top_median: float
    decreasing: bool
    final: float

    @property
    def passed(self) -> bool:
        return self.decreasing and self.final < 0.5


def keldysh_check(f: FunctionExpr, g: FunctionExpr, r_grid: Sequence[float], tol: float = 1e-6) -> KeldyshResult:
    """m(r, f) + m(r, g) along the grid, on radii clear of both pole sets."""
    joint = PoleZeroRegistry(tuple(f.reg.poles()) + tuple(g.reg.poles()))
    radii = [admissible_radius(joint, float(r)) for r in r_grid]
    with log.trace("keldysh_check", points=len(radii)):
        sums = parallel_map(lambda r: proximity_estimate(f, r, tol)[0] + proximity_estimate(g, r, tol)[0], radii)
    bottom, top = decile_medians(sums)
    return KeldyshResult(r_grid=radii, sums=sums, bottom_median=bottom, top_median=top,
                         decreasing=top < bottom, final=sums[-1])


class LogDerivMargin(BaseModel):
    r: float
    beta: float
    d_beta: float
    T_beta_r: float
    samples: int


def logderiv_bound_check(g: FunctionExpr, r: float, beta: float, margin: Optional[float] = None,
                         tol: float = 1e-6) -> LogDerivMargin:
    """
    Smallest d with |g'/g| <= d T(beta r, g)/r + sum over |a_k| < beta r of 2/|z - a_k|
    at every sampled point of |z| = r.
    """
    if beta <= 1:
        raise PreconditionViolation(f"beta must exceed 1, got {beta}")
    reg = g.reg
    if not reg.complete:
        raise IncompleteRegistry("logarithmic derivative bound needs every zero and pole")
    for e in reg.entries:
        if abs(e.modulus - r) <= (margin if margin is not None else 1e-4 * r):
            raise PoleOnCircle(r, e.location)
    n = angle_count(r)
    zs = circle_points(r, n)
    dg = evaluate_array(differentiate(g), zs)
    gv = evaluate_array(g, zs)
    ratio = np.exp(np.where(np.isneginf(dg.logmag), -np.inf, dg.logmag - gv.logmag))
    near = [(e.location, e.multiplicity) for e in reg.entries if e.modulus < beta * r]
    s = np.zeros(n)
    for a, m in near:
        s += 2.0 * m / np.abs(zs - a)
    T = characteristic(g, admissible_radius(reg, beta * r), tol)
    excess = float(np.max(ratio - s))
    if excess <= 0:
        d = 0.0
    else:
        d = excess * r / T if T > 0 else math.inf
    return LogDerivMargin(r=float(r), beta=float(beta), d_beta=d, T_beta_r=T, samples=n)


class LogDerivProfile(BaseModel):
    margins: List[LogDerivMargin]
    bottom_max: float
    top_max: float
    bounded: bool
    # radii where the near-entry sum alone fell short and T(beta r) was needed
    positive: int = 0


def logderiv_bound_profile(g: FunctionExpr, r_grid: Sequence[float], beta: float) -> LogDerivProfile:
    reg = g.reg
    radii = [admissible_radius(reg, float(r)) for r in r_grid]
    margins = parallel_map(lambda r: logderiv_bound_check(g, r, beta), radii)
    d = [m.d_beta for m in margins]
    half = len(d) // 2
    bottom, top = max(d[:half] or [0.0]), max(d[half:] or [0.0])
    return LogDerivProfile(margins=margins, bottom_max=bottom, top_max=top, bounded=top <= 10 * bottom + 1e-9)


class MilesRossiResult(BaseModel):
    r: float
    gamma: float
    zeros: int
    measure: float
    resolution: float


def miles_rossi_measure(f: FunctionExpr, r: float, gamma: float, samples: int = 2 ** 14) -> MilesRossiResult:
    """Lebesgue measure of the angles where |z f'(z)/f(z)| > gamma n(r, 1/f)."""
    if not 0 < gamma < 1:
        raise PreconditionViolation(f"gamma must lie in (0, 1), got {gamma}")
    reg = f.reg
    if reg.poles():
        raise PreconditionViolation("angular measure is defined for entire functions")
    n = counting_number(reg, r, "zero")
    if n == 0:
        raise NoZeros(r)
    _guard_circle(reg, r, 1e-9 * r)
    zs = circle_points(r, samples)
    lhs = math.log(r) + evaluate_array(differentiate(f), zs).logmag - evaluate_array(f, zs).logmag
    hits = int(np.count_nonzero(lhs > math.log(gamma * n)))
    step = 2.0 * math.pi / samples
    return MilesRossiResult(r=float(r), gamma=gamma, zeros=n, measure=hits * step, resolution=step)


def miles_rossi_bound(gamma: float, M: float, rho: float) -> float:
    return ((1.0 - gamma) / (7.0 * M * (rho + 1.0))) ** 2


def arc_theta(H: FunctionExpr, r: float, samples: int = 2 ** 14, refine: int = 6) -> Tuple[float, bool]:
    """
    (theta(r), flag): r theta(r) is the longest arc of |z| = r with |H| > 1;
    flag is set when the minimum modulus exceeds 1, and theta is then 2 pi.
    """
    _guard_circle(H.reg, r, 1e-9 * max(r, 1.0), kind="zero")
    step = 2.0 * math.pi / samples
    above = evaluate_array(H, circle_points(r, samples)).logmag > 0
    if np.all(above):
        return 2.0 * math.pi, True
    if not np.any(above):
        return 0.0, False
    # rotate so that index 0 is below; runs of `above` then never wrap
    start = int(np.flatnonzero(~above)[0])
    rolled = np.roll(above, -start)
    best_len, best_at, run_at = 0, 0, None
    for i, flag in enumerate(np.append(rolled, False)):
        if flag and run_at is None:
            run_at = i
        elif not flag and run_at is not None:
            if i - run_at > best_len:
                best_len, best_at = i - run_at, run_at
            run_at = None
    # unwrapped indices; angles past 2 pi are fine on the circle
    first = best_at + start
    last = best_at + best_len - 1 + start

    def edge(inside: float, outside: float) -> float:
        for _ in range(refine):
            mid = 0.5 * (inside + outside)
            if evaluate_array(H, [r * np.exp(1j * mid)]).logmag[0] > 0:
                inside = mid
            else:
                outside = mid
        return inside

    lo = edge(first * step, (first - 1) * step)
    hi = edge(last * step, (last + 1) * step)
    return min(hi - lo, 2.0 * math.pi), False


class ArcProfile(BaseModel):
    r_grid: List[float]
    theta: List[float]
    min_modulus_above_one: List[bool]
    tau: float
    rho: float
    F_upper_density: float
    F_tau_lower_density: float
    F_tau_bound: float
    holds: bool
    # angular step after edge refinement
    resolution: float = 0.0


def arc_profile(H: FunctionExpr, r_grid: Sequence[float], tau: float, rho: float,
                slack: float = 0.1, samples: int = 2 ** 14, refine: int = 6) -> ArcProfile:
    """
    Either the radii with minimum modulus above 1 have positive upper
    logarithmic density, or the radii with theta(r) > 2 pi (1 - tau) have lower
    logarithmic density at least (1 - 2 rho (1 - tau))/tau, up to slack.
    Arc edges are located to 2 pi / (samples 2^refine), 2 pi / 2^20 by default.
    """
    radii = [admissible_radius(H.reg, float(r)) for r in r_grid]
    rows = parallel_map(lambda r: arc_theta(H, r, samples, refine), radii)
    theta = [t for t, _ in rows]
    flags = [f for _, f in rows]
    F = RadialSet.from_indicator(radii, flags)
    F_tau = RadialSet.from_indicator(radii, [t > 2 * math.pi * (1 - tau) for t in theta])
    top = radii[-1]
    F_upper = log_density(F, top)[1]
    F_tau_lower = log_density(F_tau, top)[0]
    bound = (1 - 2 * rho * (1 - tau)) / tau
    holds = F_upper > slack or F_tau_lower >= min(bound, 1.0) - slack
    return ArcProfile(r_grid=radii, theta=theta, min_modulus_above_one=flags, tau=tau, rho=rho,
                      F_upper_density=F_upper, F_tau_lower_density=F_tau_lower, F_tau_bound=bound, holds=holds,
                      resolution=2.0 * math.pi / (samples * 2 ** refine))
