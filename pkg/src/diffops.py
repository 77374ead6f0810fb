"""
Forward differences, divided differences, and the checks that tie them to
derivatives: commutation of Delta with d/dz and the asymptotic relations away
from exceptional discs.
"""
import csv
import math
from dataclasses import dataclass
from math import comb
from typing import List, Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from src.epsilon import EpsilonSet
from src.errors import AllExcluded, PoleHit, PrecisionLoss, PreconditionViolation
from src.expr import (FunctionExpr, Quotient, Sum, differentiate, evaluate, evaluate_array, evaluate_mp,
                      is_zero, shift)
from src.grid import angle_count, decile_medians
from src.logcomplex import LogArray, LogComplex, log_sum, relative_deviation_array
from src.precision import DEFAULT_BITS, ESCALATION_NATS, lost_budget, mp_context
from src.sampling import disk_points
from util.log import Log
from util.pool import parallel_map

log = Log("diffops")

Relation = Literal["difference", "taylor2", "shift_ratio", "logderiv"]

# cancellation a relation point may carry before escalation; leaves about five significant digits
RELATION_ESCALATION_NATS = 25.0


@dataclass(frozen=True)
class DifferenceResult:
    expr: FunctionExpr
    order_n: int
    base: FunctionExpr

    def __call__(self, z: complex) -> LogComplex:
        return evaluate(self.expr, z)


def forward_difference(f: FunctionExpr, n: int) -> DifferenceResult:
    """Delta^n f built structurally: Delta^{k+1} f(z) = Delta^k f(z+1) - Delta^k f(z)."""
    if n < 1:
        raise PreconditionViolation(f"difference order must be positive, got {n}")
    e = f
    for _ in range(n):
        e = Sum((shift(e, 1), -e))
    return DifferenceResult(e, n, f)


def binomial_difference_eval(f: FunctionExpr, n: int, z: complex, bits: int = DEFAULT_BITS) -> LogComplex:
    """Delta^n f(z) = sum_k (-1)^(n-k) C(n,k) f(z+k), summed directly."""
    if n < 1:
        raise PreconditionViolation(f"difference order must be positive, got {n}")
    zs = np.array([z + k for k in range(n + 1)], dtype=complex)
    vals = evaluate_array(f, zs, bits)
    weights = np.array([math.log(comb(n, k)) for k in range(n + 1)])
    signs = np.array([math.pi if (n - k) % 2 else 0.0 for k in range(n + 1)])
    logmag, arg, loss = log_sum((vals.logmag + weights)[:, None], (vals.arg + signs)[:, None])
    if loss[0] <= ESCALATION_NATS:
        return LogComplex(float(logmag[0]), float(arg[0]))
    ctx = mp_context(bits)
    terms = [(-1) ** (n - k) * comb(n, k) * evaluate_mp(f, ctx.mpc(z) + k, bits) for k in range(n + 1)]
    total = ctx.fsum(terms)
    top = max(abs(t) for t in terms)
    if total == 0 or top == 0:
        return LogComplex.zero()
    lost = float(ctx.log(top / abs(total)))
    if lost > lost_budget(bits):
        raise PrecisionLoss(lost, lost_budget(bits), bits)
    return LogComplex.from_mp(ctx, total)


def divided_difference(f: FunctionExpr, n: int) -> FunctionExpr:
    """Delta^n f / f."""
    if is_zero(f):
        raise PreconditionViolation("divided difference of the zero function")
    return Quotient(forward_difference(f, n).expr, f)


def nth_derivative(f: FunctionExpr, n: int) -> FunctionExpr:
    for _ in range(n):
        f = differentiate(f)
    return f


def _binomial_difference_array(f: FunctionExpr, n: int, zs: np.ndarray) -> LogArray:
    """binomial_difference_eval at many points; cancelled points go through the extended path one by one."""
    vals = [evaluate_array(f, zs + k) for k in range(n + 1)]
    weights = np.array([math.log(comb(n, k)) for k in range(n + 1)])[:, None]
    signs = np.array([math.pi if (n - k) % 2 else 0.0 for k in range(n + 1)])[:, None]
    logmag, arg, loss = log_sum(np.stack([v.logmag for v in vals]) + weights,
                                np.stack([v.arg for v in vals]) + signs)
    for i in np.flatnonzero(loss > ESCALATION_NATS):
        v = binomial_difference_eval(f, n, complex(zs[i]))
        logmag[i], arg[i] = v.logmag, v.arg
    return LogArray.of(logmag, arg)


def check_commutation(f: FunctionExpr, n: int, samples: int, seed: int = 0, radius: float = 10.0,
                      retries: int = 8) -> float:
    """
    Max relative deviation between (Delta^n f)', differentiated as a tree, and
    Delta^n (f') summed pointwise from the binomial formula.
    """
    lhs = differentiate(forward_difference(f, n).expr)
    d1 = differentiate(f)
    rng = np.random.default_rng(seed)
    # poles of Delta^n f sit among the poles of f shifted by 0..n
    avoid = [e.location - k for e in f.reg.poles() for k in range(n + 1)]
    worst = 0.0
    with log.trace("check_commutation", n=n, samples=samples):
        for attempt in range(retries):
            zs = disk_points(rng, samples, radius, avoid, margin=1e-3 * (1 + radius))
            try:
                a = evaluate_array(lhs, zs)
                b = _binomial_difference_array(d1, n, zs)
            except PoleHit as e:
                log.debug("commutation sample hit a pole, resampling", attempt=attempt, z=str(e.z))
                avoid.append(e.z)
                continue
            worst = float(np.max(relative_deviation_array(a, b)))
            return worst
    raise PoleHit(complex(avoid[-1]))


class AsymptoticRecord(BaseModel):
    r: float
    max_dev: float
    excluded_fraction: float
    admitted: int
    all_excluded: bool = False


class AsymptoticReport(BaseModel):
    relation: str
    n: int
    c_values: List[Tuple[float, float]]
    r_grid: List[float]
    records: List[AsymptoticRecord]
    bottom_median: float = math.nan
    top_median: float = math.nan
    decreasing: bool = False

    def to_csv(self, path: str):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "max_dev", "excluded_fraction"])
            for rec in self.records:
                w.writerow([repr(rec.r), repr(rec.max_dev), repr(rec.excluded_fraction)])


def c_samples(c_max: float, count: int) -> List[complex]:
    """Deterministic spread of shifts with |c| <= c_max; the first is c_max itself."""
    out = [complex(c_max)]
    for j in range(1, count):
        rho = c_max * (j + 1) / (count + 1)
        phi = 2 * math.pi * ((j * (math.sqrt(5) - 1) / 2) % 1.0)
        out.append(rho * complex(math.cos(phi), math.sin(phi)))
    return out


def _relation_pairs(f: FunctionExpr, n: int, relation: Relation, cs: Sequence[complex]):
    """(numerator, denominator, scale) trees whose ratio should tend to 1 (or 0 for logderiv)."""
    pairs = []
    if relation == "difference":
        if n == 1:
            d1 = differentiate(f)
            for c in cs:
                pairs.append((shift(f, c) - f, d1, c))
        else:
            pairs.append((forward_difference(f, n).expr, nth_derivative(f, n), 1.0))
    elif relation == "taylor2":
        d1, d2 = differentiate(f), nth_derivative(f, 2)
        for c in cs:
            pairs.append((shift(f, c) - f - d1 * c, d2, c * c / 2))
    elif relation == "shift_ratio":
        for c in cs:
            pairs.append((shift(f, c), f, 1.0))
    elif relation == "logderiv":
        d1 = differentiate(f)
        for c in cs:
            pairs.append((shift(d1, c), shift(f, c), 0.0))
    else:
        raise ValueError(f"unknown relation {relation!r}")
    return pairs


def asymptotic_difference_check(f: FunctionExpr, n: int, c_max: float, r_grid: Sequence[float],
                                eps: EpsilonSet, order_estimate: float, relation: Relation = "difference",
                                c_count: int = 3) -> AsymptoticReport:
    """
    Per radius, the max over admitted angles (and sampled shifts c) of the
    deviation of the chosen relation:
      difference   |(f(z+c)-f(z))/(c f'(z)) - 1|, or |Delta^n f/f^(n) - 1| for n > 1
      taylor2      | |f(z+c)-f(z)-c f'(z)| / (|c|^2 |f''(z)|/2) - 1 |
      shift_ratio  |f(z+c)/f(z) - 1|
      logderiv     |f'(z+c)/f(z+c)|
    Angles whose point lies in eps are not admitted. order_estimate is the
    growth order of f (see nevanlinna.growth_profile); it must be known and below 1.
    Points are escalated to the extended path only past RELATION_ESCALATION_NATS
    of cancellation.
    """
    if not order_estimate < 0.95:
        raise PreconditionViolation(f"relation needs order below 1, estimated {order_estimate:.3f}")
    cs = c_samples(c_max, c_count) if (n == 1 or relation != "difference") else [1 + 0j]
    pairs = _relation_pairs(f, n, relation, cs)

    def one(r: float) -> AsymptoticRecord:
        m = angle_count(r)
        zs = r * np.exp(2j * np.pi * np.arange(m) / m)
        inside = eps.contains(zs)
        ok = zs[~inside]
        frac = float(np.count_nonzero(inside)) / m
        if not len(ok):
            log.warning(str(AllExcluded(r)), r=float(r))
            return AsymptoticRecord(r=float(r), max_dev=math.nan, excluded_fraction=frac, admitted=0,
                                    all_excluded=True)
        worst = 0.0
        for num, den, scale in pairs:
            a = evaluate_array(num, ok, escalation_nats=RELATION_ESCALATION_NATS)
            b = evaluate_array(den, ok, escalation_nats=RELATION_ESCALATION_NATS)
            if relation == "logderiv":
                dev = np.exp(a.logmag - b.logmag)
            else:
                if scale != 1.0:
                    b = b * LogArray.constant(LogComplex.from_complex(complex(scale)), len(ok))
                if relation == "taylor2":
                    # compare moduli only
                    dev = np.abs(np.expm1(a.logmag - b.logmag))
                else:
                    dev = relative_deviation_array(a, b)
            worst = max(worst, float(np.max(dev)))
        return AsymptoticRecord(r=float(r), max_dev=worst, excluded_fraction=frac, admitted=len(ok))

    with log.trace("asymptotic_difference_check", relation=relation, n=n, points=len(r_grid)):
        records = parallel_map(one, [float(r) for r in r_grid])
    devs = [rec.max_dev for rec in records if not rec.all_excluded]
    bottom, top = decile_medians(devs) if devs else (math.nan, math.nan)
    return AsymptoticReport(relation=relation, n=n, c_values=[(c.real, c.imag) for c in cs],
                            r_grid=[float(r) for r in r_grid], records=records,
                            bottom_median=bottom, top_median=top, decreasing=bool(top < bottom))
