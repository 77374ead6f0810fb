"""
The one-zero pair (f, g) with g = f(z+1) - f(z).

From n_1 < ... < n_K:
    H(z) = prod (1 + z / A_k),  A_k = 4 n_k^4
    h(z) = H(z^4) / z            zeros at n_k(+-1 +-i), one pole at 0
    c_k  = 1 / h'(-n_k + i n_k)
    g    = 1/h = z / H(z^4)      as partial fractions over the 4K zeros of h
    f    = sum_k c_k sum_{j=-n_k}^{n_k-1} [1/(z+j-in_k) - 1/(z+j+in_k)]
"""
import json
import math
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.contour import Contour, count_zeros_in_disk, winding_count
from src.errors import DegenerateZero, IdentityFailure, PreconditionViolation
from src.expr import (FactorProduct, FunctionExpr, GroupedPartialFractions, PowerCompose, Quotient, Var,
                      differentiate, evaluate_mp)
from src.nevanlinna import counting_number, growth_profile
from src.precision import DEFAULT_BITS, format_complex, mp_context, num
from src.registry import PoleZeroRegistry
from src.sampling import disk_points
from util.log import Log
from util.pool import parallel_map

log = Log("counterexample")

# |h'| below this at a zero of h means the zero is not simple
DEGENERATE_DERIVATIVE = 1e-30


class OneZeroSpec(BaseModel):
    n_seq: List[int]
    ratio_floor: float = 4.0

    @model_validator(mode="after")
    def _check(self) -> "OneZeroSpec":
        if not self.n_seq:
            raise ValueError("n_seq needs at least one term")
        if any(n <= 0 for n in self.n_seq):
            raise ValueError("n_seq terms must be positive")
        for a, b in zip(self.n_seq, self.n_seq[1:]):
            if b <= a:
                raise ValueError(f"n_seq must be strictly increasing, got {a} then {b}")
            if b / a < self.ratio_floor:
                raise ValueError(f"ratio {b}/{a} below the floor {self.ratio_floor}")
        return self

    @property
    def K(self) -> int:
        return len(self.n_seq)

    def A(self) -> List[int]:
        return [4 * n ** 4 for n in self.n_seq]


@dataclass(frozen=True)
class OneZeroBundle:
    spec: OneZeroSpec
    H: FunctionExpr
    h: FunctionExpr
    g: FunctionExpr
    f: FunctionExpr
    c_seq: Tuple[Any, ...]
    # poles of f
    pole_lattice: PoleZeroRegistry

    def zeros_of_h(self) -> List[complex]:
        return [n * complex(sx, sy) for n in self.spec.n_seq for sx in (1, -1) for sy in (1, -1)]


def build_H(spec: OneZeroSpec) -> FunctionExpr:
    return FactorProduct(tuple(spec.A()))


def build_h(spec: OneZeroSpec) -> FunctionExpr:
    return Quotient(PowerCompose(build_H(spec), 4), Var())


def residues(spec: OneZeroSpec, bits: int = DEFAULT_BITS) -> List[Any]:
    """c_k = 1/h'(-n_k + i n_k) at `bits` of precision; the weights n_k |c_k| must strictly decrease."""
    dh = differentiate(build_h(spec))
    ctx = mp_context(bits)
    out = []
    for n in spec.n_seq:
        beta = ctx.mpc(-n, n)
        d = evaluate_mp(dh, beta, bits)
        if abs(d) < DEGENERATE_DERIVATIVE:
            raise DegenerateZero(f"h' vanishes at {complex(beta)}: |h'| = {float(abs(d)):.3e}")
        out.append(num(1 / d))
    ratios = decay_ratios(spec, out)
    if any(q >= 1 for q in ratios):
        raise PreconditionViolation(f"n_k |c_k| does not decrease: ratios {ratios}")
    log.debug("residues computed", K=spec.K, ratios=ratios)
    return out


def decay_ratios(spec: OneZeroSpec, c_seq: Sequence[Any]) -> List[float]:
    """Successive quotients of n_k |c_k|."""
    w = [n * float(abs(c)) for n, c in zip(spec.n_seq, c_seq)]
    return [b / a for a, b in zip(w, w[1:])]


def residue_weight_sum(spec: OneZeroSpec, c_seq: Sequence[Any]) -> float:
    return math.fsum(n * float(abs(c)) for n, c in zip(spec.n_seq, c_seq))


def build_g(spec: OneZeroSpec, c_seq: Sequence[Any]) -> FunctionExpr:
    terms = []
    for n, c in zip(spec.n_seq, c_seq):
        c = num(c)
        terms += [
            (c, complex(-n, n)),
            (-c, complex(n, n)),
            (-c, complex(-n, -n)),
            (c, complex(n, -n)),
        ]
    return GroupedPartialFractions(tuple(terms))


def build_f(spec: OneZeroSpec, c_seq: Sequence[Any]) -> FunctionExpr:
    terms = []
    for n, c in zip(spec.n_seq, c_seq):
        c = num(c)
        for j in range(-n, n):
            terms.append((c, complex(-j, n)))
            terms.append((-c, complex(-j, -n)))
    return GroupedPartialFractions(tuple(terms))


def build_bundle(spec: OneZeroSpec, bits: int = DEFAULT_BITS) -> OneZeroBundle:
    with log.trace("build_bundle", n_seq=list(spec.n_seq)):
        c_seq = residues(spec, bits)
        f = build_f(spec, c_seq)
        return OneZeroBundle(spec=spec, H=build_H(spec), h=build_h(spec), g=build_g(spec, c_seq), f=f,
                             c_seq=tuple(c_seq), pole_lattice=f.reg)


class IdentityResult(BaseModel):
    name: str
    tolerance: float
    max_error: float
    points: int
    worst_point: Optional[Tuple[float, float]] = None
    worst_lhs: Optional[str] = None
    worst_rhs: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance


class CountIdentity(BaseModel):
    name: str
    radius: float
    expected: int
    measured: int

    @property
    def passed(self) -> bool:
        return self.expected == self.measured


class BundleReport(BaseModel):
    n_seq: List[int]
    bits: int
    identities: List[IdentityResult] = Field(default_factory=list)
    counts: List[CountIdentity] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.identities) and all(c.passed for c in self.counts)

    def raise_for_failure(self):
        for i in self.identities:
            if not i.passed:
                z = complex(*i.worst_point) if i.worst_point else None
                raise IdentityFailure(i.name, z, i.worst_lhs, i.worst_rhs, i.max_error)
        for c in self.counts:
            if not c.passed:
                raise IdentityFailure(c.name, c.radius, c.measured, c.expected, float(abs(c.measured - c.expected)))


def _identity(name: str, zs: Sequence[Any], sides: Callable[[Any], Tuple[Any, Any]], tol: float,
              bits: int) -> IdentityResult:
    """Max relative error |lhs - rhs| / |rhs| over zs, in the calling thread's extended context."""

    def one(z):
        ctx = mp_context(bits)
        lhs, rhs = sides(ctx.convert(z))
        scale = abs(rhs) if rhs != 0 else abs(lhs)
        err = float(abs(lhs - rhs) / scale) if scale != 0 else 0.0
        return err, z, lhs, rhs

    rows = parallel_map(one, list(zs))
    err, z, lhs, rhs = max(rows, key=lambda t: t[0])
    z = complex(z)
    return IdentityResult(name=name, tolerance=tol, max_error=err, points=len(rows),
                          worst_point=(z.real, z.imag), worst_lhs=format_complex(lhs), worst_rhs=format_complex(rhs))


def verify_bundle(b: OneZeroBundle, samples: int = 100, seed: int = 0, bits: int = DEFAULT_BITS,
                  tolerances: Optional[dict] = None) -> BundleReport:
    """
    Checks, in extended precision:
      difference    f(z+1) - f(z) = g(z)
      rational      g(z) = z / H(z^4)
      winding       net winding of g on |z| = 1.5 sqrt2 n_K is 1 - 4K, and g has one zero
      symmetry      h'(i beta) = -h'(beta) at the 4K zeros of h
    """
    tol = {"difference": 1e-12, "rational": 1e-10, "symmetry": 1e-12}
    tol.update(tolerances or {})
    spec = b.spec
    nK = spec.n_seq[-1]
    R = 1.5 * math.sqrt(2) * nK
    rng = np.random.default_rng(seed)
    f_poles = [e.location for e in b.f.reg.poles()]
    avoid = f_poles + [p - 1 for p in f_poles] + [e.location for e in b.g.reg.poles()] + [0j]
    zs = list(disk_points(rng, samples, R, avoid, margin=0.5))
    report = BundleReport(n_seq=list(spec.n_seq), bits=bits)
    log_ = log.with_context(n_seq=list(spec.n_seq))

    with log_.trace("verify_bundle", samples=samples, bits=bits):
        report.identities.append(_identity(
            "difference", zs,
            lambda z: (evaluate_mp(b.f, z + 1, bits) - evaluate_mp(b.f, z, bits), evaluate_mp(b.g, z, bits)),
            tol["difference"], bits))
        report.identities.append(_identity(
            "rational", zs,
            lambda z: (evaluate_mp(b.g, z, bits), z / evaluate_mp(b.H, z ** 4, bits)),
            tol["rational"], bits))
        dh = differentiate(b.h)
        report.identities.append(_identity(
            "symmetry", b.zeros_of_h(),
            lambda beta: (evaluate_mp(dh, beta * 1j, bits), -evaluate_mp(dh, beta, bits)),
            tol["symmetry"], bits))

        net = winding_count(b.g, Contour.circle(R)).net
        report.counts.append(CountIdentity(name="winding", radius=R, expected=1 - 4 * spec.K, measured=net))
        for radius in (2.0 * nK, 2.0 * math.sqrt(2) * nK):
            report.counts.append(CountIdentity(name="zeros", radius=radius, expected=1,
                                               measured=count_zeros_in_disk(b.g, radius)))
    log_.info("bundle verified", passed=report.passed,
              errors={i.name: i.max_error for i in report.identities})
    return report


def _closed_under(points: Sequence[complex], mapping: Callable[[complex], complex], tol: float = 1e-9) -> bool:
    pts = np.array(points, dtype=complex)
    if not len(pts):
        return True
    images = np.array([mapping(p) for p in pts], dtype=complex)
    return bool(np.all(np.min(np.abs(images[:, None] - pts[None, :]), axis=1) <= tol * (1 + np.abs(images))))


class SymmetryReport(BaseModel):
    g_conjugate: bool
    g_reflection: bool
    f_conjugate: bool
    # z -> 1 - conj(z): the f lattice runs over real parts 1-n_k .. n_k
    f_reflection: bool

    @property
    def passed(self) -> bool:
        return self.g_conjugate and self.g_reflection and self.f_conjugate and self.f_reflection


def symmetry_check(b: OneZeroBundle) -> SymmetryReport:
    gp = [e.location for e in b.g.reg.poles()]
    fp = [e.location for e in b.f.reg.poles()]
    return SymmetryReport(
        g_conjugate=_closed_under(gp, lambda z: z.conjugate()),
        g_reflection=_closed_under(gp, lambda z: -z.conjugate()),
        f_conjugate=_closed_under(fp, lambda z: z.conjugate()),
        f_reflection=_closed_under(fp, lambda z: 1 - z.conjugate()),
    )


class GrowthPredicates(BaseModel):
    r_grid: List[float]
    T_f_over_r: List[float]
    n_f_over_r: List[float]
    T_g_over_log2: List[float]
    pole_ratio_bound: float
    f_bounded: bool
    poles_bounded: bool
    g_bounded: bool

    @property
    def passed(self) -> bool:
        return self.f_bounded and self.poles_bounded and self.g_bounded


def _bounded(values: Sequence[float], factor: float = 2.0) -> bool:
    return max(values) < factor * float(np.median(values))


def growth_predicates(b: OneZeroBundle, r_grid: Sequence[float], pole_ratio_bound: float = 6.0,
                      tol: float = 1e-6) -> GrowthPredicates:
    """T(r,f)/r and T(r,g)/(log r)^2 stay within twice their medians; n(r,f)/r stays below the bound."""
    if min(r_grid) <= 1:
        raise PreconditionViolation("growth predicates need radii above 1")
    pf = growth_profile(b.f, r_grid, tol)
    pg = growth_profile(b.g, r_grid, tol)
    tf = [t / r for t, r in zip(pf.T_vals, pf.r_grid)]
    nf = [counting_number(b.f.reg, r, "pole") / r for r in pf.r_grid]
    tg = [t / math.log(r) ** 2 for t, r in zip(pg.T_vals, pg.r_grid)]
    return GrowthPredicates(r_grid=pf.r_grid, T_f_over_r=tf, n_f_over_r=nf, T_g_over_log2=tg,
                            pole_ratio_bound=pole_ratio_bound, f_bounded=_bounded(tf),
                            poles_bounded=max(nf) <= pole_ratio_bound, g_bounded=_bounded(tg))


def export_bundle(b: OneZeroBundle, path: Optional[str] = None) -> dict:
    """JSON-ready description: n_seq, residues as decimal strings, pole lists of g and f."""

    def pts(reg: PoleZeroRegistry) -> List[List[float]]:
        return [[e.location.real, e.location.imag] for e in reg.poles()]

    doc = {
        "n_seq": list(b.spec.n_seq),
        "ratio_floor": b.spec.ratio_floor,
        "c_seq": [format_complex(c) for c in b.c_seq],
        "weight_sum": residue_weight_sum(b.spec, b.c_seq),
        "decay_ratios": decay_ratios(b.spec, b.c_seq),
        "g_poles": pts(b.g.reg),
        "f_poles": pts(b.f.reg),
    }
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
    return doc
