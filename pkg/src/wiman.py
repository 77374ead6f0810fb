"""
Power-series side of growth: Taylor windows by FFT Cauchy extraction, maximum
term and central index, and the derivative asymptotic at maximum-modulus points.
"""
import csv
import math
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from src.errors import FlatModulus, PoleInDisk, WindowTooShort
from src.expr import FunctionExpr, differentiate, evaluate_array
from src.grid import decile_medians, require_decades, secant_order
from src.logcomplex import LogComplex, relative_deviation
from util.log import Log
from util.pool import parallel_map

log = Log("wiman")

# coefficients this far below the maximal term are unrecoverable in double
LOST_RATIO = 1e-13
# ties between terms are decided in log scale
TIE_TOL = 1e-9
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class TaylorWindow(BaseModel):
    extraction_radius: float
    # log|a_k| and arg a_k; -inf marks a coefficient reported as zero
    log_abs: List[float]
    args: List[float]
    lost: List[bool]
    # largest discarded high-frequency term relative to the maximal term
    error_bound: float = 0.0

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex], r: float = 1.0) -> "TaylorWindow":
        la, ar = [], []
        for c in coeffs:
            v = LogComplex.from_complex(complex(c))
            la.append(v.logmag)
            ar.append(v.arg)
        return cls(extraction_radius=r, log_abs=la, args=ar, lost=[False] * len(la))

    @property
    def m(self) -> int:
        return len(self.log_abs) - 1

    @property
    def coeffs(self) -> List[complex]:
        out = []
        for la, a in zip(self.log_abs, self.args):
            out.append(0j if la == -math.inf else LogComplex(la, a).to_complex())
        return out

    def polynomial_value(self, z: complex) -> complex:
        return complex(np.polyval(np.array(self.coeffs[::-1]), z))


def taylor_coeffs(f: FunctionExpr, m: int, r: float) -> TaylorWindow:
    """a_0..a_m of f by the equal-angle Cauchy rule on |z| = r with at least 8m points."""
    for e in f.reg.poles():
        if e.modulus <= r:
            raise PoleInDisk(r, e.location)
    q = 1 << max(4, int(math.ceil(math.log2(8 * max(m, 1)))))
    theta = 2.0 * np.pi * np.arange(q) / q
    vals = evaluate_array(f, r * np.exp(1j * theta))
    top = float(np.max(vals.logmag))
    if top == -math.inf:
        zeros = [-math.inf] * (m + 1)
        return TaylorWindow(extraction_radius=r, log_abs=zeros, args=[0.0] * (m + 1), lost=[False] * (m + 1))
    scaled = np.exp(vals.logmag - top) * np.exp(1j * vals.arg)
    spec = np.fft.fft(scaled) / q
    mags = np.abs(spec)
    peak = float(np.max(mags[: m + 1]))
    log_abs, args, lost = [], [], []
    for k in range(m + 1):
        if mags[k] < LOST_RATIO * peak or mags[k] == 0:
            log_abs.append(-math.inf)
            args.append(0.0)
            lost.append(bool(mags[k] > 0 or peak == 0))
        else:
            log_abs.append(math.log(mags[k]) + top - k * math.log(r))
            args.append(float(np.angle(spec[k])))
            lost.append(False)
    tail = mags[m + 1: q // 2]
    bound = float(np.max(tail) / peak) if len(tail) and peak > 0 else 0.0
    return TaylorWindow(extraction_radius=r, log_abs=log_abs, args=args, lost=lost, error_bound=bound)


def max_term_central_index(t: TaylorWindow, r: float) -> Tuple[float, int]:
    """(log mu(r), N(r)); N is the largest index attaining the maximal term."""
    lr = math.log(r)
    terms = [la + k * lr for k, la in enumerate(t.log_abs)]
    mu = max(terms)
    if mu == -math.inf:
        raise WindowTooShort(0, len(terms))
    n = max(k for k, v in enumerate(terms) if v >= mu - TIE_TOL * max(1.0, abs(mu)))
    if n >= t.m - 2:
        # an edge maximiser is fine only when nothing of the series lies past it
        captured = t.error_bound <= 1e-12 and all(x == -math.inf for x in t.log_abs[n + 1:])
        if not captured or t.m < 1:
            raise WindowTooShort(n, len(terms))
    return mu, n


def central_index_at(f: FunctionExpr, r: float, m: int = 32, max_m: int = 4096) -> Tuple[float, int, TaylorWindow]:
    """Grow the window until its maximal term is interior."""
    while True:
        window = taylor_coeffs(f, m, r)
        try:
            mu, n = max_term_central_index(window, r)
            return mu, n, window
        except WindowTooShort:
            if 2 * m > max_m:
                raise
            m *= 2


class CentralIndexProfile(BaseModel):
    r_grid: List[float]
    mu_vals: List[float]
    N_vals: List[int]

    def monotone(self) -> bool:
        return all(b >= a for a, b in zip(self.N_vals, self.N_vals[1:]))

    def log_mu_convex(self, slack: float = 1e-9) -> bool:
        """Discrete midpoint convexity of log mu in log r."""
        x = np.log(self.r_grid)
        y = np.asarray(self.mu_vals)
        for i in range(1, len(x) - 1):
            w = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1])
            chord = (1 - w) * y[i - 1] + w * y[i + 1]
            if y[i] > chord + slack * max(1.0, abs(chord)):
                return False
        return True

    def to_csv(self, path: str):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "log_mu", "N"])
            for row in zip(self.r_grid, self.mu_vals, self.N_vals):
                w.writerow([repr(float(row[0])), repr(float(row[1])), row[2]])


def central_index_profile(f: FunctionExpr, r_grid: Sequence[float]) -> CentralIndexProfile:
    with log.trace("central_index_profile", points=len(r_grid)):
        rows = parallel_map(lambda r: central_index_at(f, float(r))[:2], list(r_grid))
    return CentralIndexProfile(r_grid=[float(r) for r in r_grid], mu_vals=[mu for mu, _ in rows],
                               N_vals=[n for _, n in rows])


def central_index_order(p: CentralIndexProfile) -> float:
    """Growth exponent of N(r) over the top half of the grid (secant slopes of log N against log r)."""
    require_decades(p.r_grid, points=8)
    pairs = [(r, n) for r, n in zip(p.r_grid, p.N_vals)]
    return secant_order([r for r, _ in pairs], [float(n) for _, n in pairs])[0]


def n_power_ratio_trend(p: CentralIndexProfile, n: int) -> Tuple[List[float], bool]:
    """N(r)^n / r over the top decade of the grid and whether it decreases there."""
    top = p.r_grid[-1]
    ratios = [(N ** n) / r for r, N in zip(p.r_grid, p.N_vals) if r >= top / 10]
    return ratios, ratios[-1] < ratios[0] if len(ratios) > 1 else False


class WVResult(BaseModel):
    r: float
    n: int
    theta: float
    central_index: int
    deviation: float
    flat: bool = False


def max_modulus_point(f: FunctionExpr, r: float, samples: int = 2 ** 12, tol: float = 1e-10) -> Tuple[float, bool]:
    """Angle of the maximum of |f| on |z| = r and whether that maximum is not isolated."""
    step = 2 * math.pi / samples
    theta = step * np.arange(samples)
    lm = evaluate_array(f, r * np.exp(1j * theta)).logmag
    i = int(np.argmax(lm))
    flat = bool(np.ptp(lm) <= 1e-12 * max(1.0, abs(lm[i])))
    if not flat:
        # a second, separate sample within rounding of the maximum means the max is not isolated
        far = np.abs(((np.arange(samples) - i + samples // 2) % samples) - samples // 2) > 2
        flat = bool(np.any(far & (lm >= lm[i] - 1e-12 * max(1.0, abs(lm[i])))))
    if flat:
        log.warning("maximum modulus is not isolated", r=float(r))

    def g(t: float) -> float:
        return float(evaluate_array(f, [r * np.exp(1j * t)]).logmag[0])

    a, b = theta[i] - step, theta[i] + step
    c, d = b - INVPHI * (b - a), a + INVPHI * (b - a)
    gc, gd = g(c), g(d)
    while b - a > tol:
        if gc > gd:
            b, d, gd = d, c, gc
            c = b - INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + INVPHI * (b - a)
            gd = g(d)
    return 0.5 * (a + b), flat


def wv_ratio_check(f: FunctionExpr, n: int, r: float, strict: bool = False) -> WVResult:
    """|f^(n)(z)/f(z) z^n / N(r)^n - 1| at a point with |f(z)| = M(r, f)."""
    _, N, _ = central_index_at(f, r)
    theta, flat = max_modulus_point(f, r)
    z = r * complex(math.cos(theta), math.sin(theta))
    deriv = f
    for _ in range(n):
        deriv = differentiate(deriv)
    lhs = evaluate_array(deriv, [z])[0] * LogComplex.from_complex(z) ** n
    rhs = evaluate_array(f, [z])[0] * LogComplex(n * math.log(N) if N > 0 else -math.inf)
    if flat and strict:
        raise FlatModulus(f"maximum of |f| on |z| = {r} is not isolated")
    return WVResult(r=float(r), n=n, theta=theta, central_index=N, deviation=relative_deviation(lhs, rhs), flat=flat)


class WVTrend(BaseModel):
    results: List[WVResult]
    bottom_median: float
    top_median: float
    decreasing: bool


def wv_trend(f: FunctionExpr, n: int, r_grid: Sequence[float]) -> WVTrend:
    results = parallel_map(lambda r: wv_ratio_check(f, n, float(r)), list(r_grid))
    bottom, top = decile_medians([x.deviation for x in results])
    return WVTrend(results=results, bottom_median=bottom, top_median=top, decreasing=top < bottom)
