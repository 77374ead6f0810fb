"""
Immutable expression trees for meromorphic functions.

Every node evaluates two ways:
  - a vectorised double path over LogArray (used for sampling), which flags
    points where a sum cancelled past ESCALATION_NATS, and
  - an extended-precision path on mpmath values, used for flagged points and
    for identity checks.
Trees are never simplified beyond folding literal zeros.
"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, List, Sequence, Tuple, Union

import numpy as np

from src.errors import PoleHit, PrecisionLoss, Unknowable
from src.logcomplex import LogArray, LogComplex, log_sum, wrap, to_complex  # noqa: F401  (to_complex re-exported)
from src.precision import (DEFAULT_BITS, ESCALATION_NATS, num, to_double, log_abs,
                           mp_context, lost_budget)
from src.registry import (PoleZeroRegistry, product_registry, quotient_registry,
                          sum_registry)

EPS = np.finfo(float).eps
# points per vectorised block
CHUNK = 8192


def _pole_distance_guard(zs: np.ndarray, poles: np.ndarray):
    if not len(poles):
        return
    d = np.abs(zs[:, None] - poles[None, :])
    hit = d <= 4 * EPS * (1.0 + np.abs(poles))[None, :]
    if np.any(hit):
        i, j = np.argwhere(hit)[0]
        raise PoleHit(complex(zs[i]), complex(poles[j]))


class FunctionExpr(ABC):
    """A node of the tree. Concrete nodes are frozen dataclasses."""

    @abstractmethod
    def _arr(self, zs: np.ndarray) -> LogArray:
        pass

    @abstractmethod
    def _mp(self, ctx, z):
        pass

    @abstractmethod
    def _deriv(self) -> "FunctionExpr":
        pass

    @abstractmethod
    def _registry(self) -> PoleZeroRegistry:
        pass

    @cached_property
    def reg(self) -> PoleZeroRegistry:
        return self._registry()

    def __call__(self, z: complex) -> LogComplex:
        return evaluate(self, z)

    def __add__(self, other):
        return Sum((self, lift(other)))

    def __radd__(self, other):
        return Sum((lift(other), self))

    def __sub__(self, other):
        return Sum((self, -lift(other)))

    def __rsub__(self, other):
        return Sum((lift(other), -self))

    def __mul__(self, other):
        return Product((self, lift(other)))

    def __rmul__(self, other):
        return Product((lift(other), self))

    def __truediv__(self, other):
        return Quotient(self, lift(other))

    def __rtruediv__(self, other):
        return Quotient(lift(other), self)

    def __neg__(self):
        return Product((Const(-1), self))


def lift(x: Any) -> FunctionExpr:
    return x if isinstance(x, FunctionExpr) else Const(x)


def is_zero(e: FunctionExpr) -> bool:
    return isinstance(e, Const) and e.c == 0


@dataclass(frozen=True)
class Const(FunctionExpr):
    c: Any = 0

    def __post_init__(self):
        object.__setattr__(self, "c", num(self.c))

    def _arr(self, zs):
        c = to_double(self.c)
        return LogArray.constant(LogComplex(log_abs(self.c), math.atan2(c.imag, c.real)), len(zs))

    def _mp(self, ctx, z):
        return ctx.convert(self.c)

    def _deriv(self):
        return Const(0)

    def _registry(self):
        return PoleZeroRegistry()


@dataclass(frozen=True)
class Var(FunctionExpr):
    def _arr(self, zs):
        with np.errstate(divide="ignore"):
            return LogArray.of(np.log(np.abs(zs)), np.angle(zs))

    def _mp(self, ctx, z):
        return z

    def _deriv(self):
        return Const(1)

    def _registry(self):
        return PoleZeroRegistry.build(zeros=[(0j, 1)])


@dataclass(frozen=True)
class Monomial(FunctionExpr):
    k: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"Monomial power must be positive, got {self.k}")

    def _arr(self, zs):
        with np.errstate(divide="ignore"):
            return LogArray.of(self.k * np.log(np.abs(zs)), wrap(self.k * np.angle(zs)))

    def _mp(self, ctx, z):
        return z ** self.k

    def _deriv(self):
        if self.k == 1:
            return Const(1)
        if self.k == 2:
            return Product((Const(2), Var()))
        return Product((Const(self.k), Monomial(self.k - 1)))

    def _registry(self):
        return PoleZeroRegistry.build(zeros=[(0j, self.k)])


@dataclass(frozen=True)
class Sum(FunctionExpr):
    children: Tuple[FunctionExpr, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("Sum needs at least one term")

    def _arr(self, zs):
        parts = [c._arr(zs) for c in self.children]
        logmag, arg, loss = log_sum(np.stack([p.logmag for p in parts]), np.stack([p.arg for p in parts]))
        inherited = np.max(np.stack([p.loss for p in parts]), axis=0)
        return LogArray.of(logmag, arg, loss + inherited)

    def _mp(self, ctx, z):
        values = [c._mp(ctx, z) for c in self.children]
        total = ctx.fsum(values)
        top = max(abs(v) for v in values)
        if total == 0 or top == 0:
            # structural cancellation, e.g. the difference of a constant
            return ctx.mpc(0)
        lost = float(ctx.log(top / abs(total)))
        if lost > lost_budget(ctx.prec):
            raise PrecisionLoss(lost, lost_budget(ctx.prec), ctx.prec)
        return total

    def _deriv(self):
        parts = [d for d in (c._deriv() for c in self.children) if not is_zero(d)]
        if not parts:
            return Const(0)
        return parts[0] if len(parts) == 1 else Sum(tuple(parts))

    def _registry(self):
        return sum_registry([c.reg for c in self.children])


@dataclass(frozen=True)
class Product(FunctionExpr):
    children: Tuple[FunctionExpr, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("Product needs at least one factor")

    def _arr(self, zs):
        out = self.children[0]._arr(zs)
        for c in self.children[1:]:
            out = out * c._arr(zs)
        return out

    def _mp(self, ctx, z):
        out = ctx.mpc(1)
        for c in self.children:
            out *= c._mp(ctx, z)
        return out

    def _deriv(self):
        if any(is_zero(c) for c in self.children):
            return Const(0)
        terms = []
        for i, c in enumerate(self.children):
            d = c._deriv()
            if is_zero(d):
                continue
            rest = self.children[:i] + (d,) + self.children[i + 1:]
            rest = tuple(f for f in rest if not (isinstance(f, Const) and f.c == 1))
            terms.append(rest[0] if len(rest) == 1 else Product(rest) if rest else Const(1))
        if not terms:
            return Const(0)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def _registry(self):
        return product_registry([c.reg for c in self.children])


@dataclass(frozen=True)
class Quotient(FunctionExpr):
    num: FunctionExpr = field(default_factory=lambda: Const(1))
    den: FunctionExpr = field(default_factory=lambda: Const(1))

    def __post_init__(self):
        if is_zero(self.den):
            raise ValueError("Quotient denominator is identically zero")

    def _arr(self, zs):
        d = self.den._arr(zs)
        if np.any(np.isneginf(d.logmag)):
            i = int(np.argmax(np.isneginf(d.logmag)))
            raise PoleHit(complex(zs[i]))
        return self.num._arr(zs) * d.reciprocal()

    def _mp(self, ctx, z):
        d = self.den._mp(ctx, z)
        if d == 0:
            raise PoleHit(complex(z))
        return self.num._mp(ctx, z) / d

    def _deriv(self):
        dn, dd = self.num._deriv(), self.den._deriv()
        if is_zero(dd):
            return Const(0) if is_zero(dn) else Quotient(dn, self.den)
        cross = -Product((self.num, dd))
        top = cross if is_zero(dn) else Sum((Product((dn, self.den)), cross))
        return Quotient(top, Product((self.den, self.den)))

    def _registry(self):
        return quotient_registry(self.num.reg, self.den.reg)


@dataclass(frozen=True)
class Shift(FunctionExpr):
    child: FunctionExpr = field(default_factory=Var)
    c: Any = 0

    def __post_init__(self):
        object.__setattr__(self, "c", num(self.c))

    def _arr(self, zs):
        return self.child._arr(zs + to_double(self.c))

    def _mp(self, ctx, z):
        return self.child._mp(ctx, z + ctx.convert(self.c))

    def _deriv(self):
        d = self.child._deriv()
        return d if isinstance(d, Const) else Shift(d, self.c)

    def _registry(self):
        # exact translation of the child's entries by -c
        return self.child.reg.translate(-to_double(self.c))


@dataclass(frozen=True)
class FactorProduct(FunctionExpr):
    """prod_k (1 + z/A_k)"""
    a: Tuple[Any, ...] = ()

    def __post_init__(self):
        a = tuple(num(x) for x in self.a)
        if any(x == 0 for x in a):
            raise ValueError("FactorProduct needs nonzero A_k")
        object.__setattr__(self, "a", a)

    @cached_property
    def _a_double(self) -> np.ndarray:
        return np.array([to_double(x) for x in self.a], dtype=complex)

    def _arr(self, zs):
        if not self.a:
            return LogArray.constant(LogComplex(0.0), len(zs))
        w = zs[None, :] / self._a_double[:, None]
        u = 1.0 + w
        with np.errstate(divide="ignore", invalid="ignore"):
            small = 0.5 * np.log1p(2.0 * w.real + np.abs(w) ** 2)
            logs = np.where(np.abs(w) < 0.5, small, np.log(np.abs(u)))
        logmag = np.sum(logs, axis=0)
        return LogArray.of(logmag, wrap(np.sum(np.angle(u), axis=0)))

    def _mp(self, ctx, z):
        out = ctx.mpc(1)
        for a in self.a:
            out *= 1 + z / ctx.convert(a)
        return out

    def _deriv(self):
        if not self.a:
            return Const(0)
        return FactorProductDerivative(self.a)

    def _registry(self):
        return PoleZeroRegistry.build(zeros=[(-to_double(a), 1) for a in self.a])


def _log_derivative(a: Tuple[Any, ...]) -> "GroupedPartialFractions":
    """sum_k 1/(z + A_k), repeated A_k merged into one weighted term"""
    weights = {}
    for x in a:
        weights[x] = weights.get(x, 0) + 1
    return GroupedPartialFractions(tuple((num(m), -x, 1) for x, m in weights.items()))


def _checked_fsum(ctx, terms):
    """fsum that raises PrecisionLoss once cancellation passes the context's budget"""
    if not terms:
        return ctx.mpc(0)
    s = ctx.fsum(terms)
    top = max(abs(t) for t in terms)
    if s == 0 or top == 0:
        return ctx.mpc(0)
    lost = float(ctx.log(top / abs(s)))
    if lost > lost_budget(ctx.prec):
        raise PrecisionLoss(lost, lost_budget(ctx.prec), ctx.prec)
    return s


@dataclass(frozen=True)
class FactorProductDerivative(FunctionExpr):
    """P'(z) = P(z) * sum 1/(z + A_k) for P = prod_k (1 + z/A_k).

    At a zero of a single factor the log-derivative form is 0 * inf; there the
    value is the surviving product-rule term prod_{j != k} (1 + z/A_j) / A_k.
    """
    a: Tuple[Any, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(num(x) for x in self.a))

    @cached_property
    def _a_double(self) -> np.ndarray:
        return np.array([to_double(x) for x in self.a], dtype=complex)

    def _arr(self, zs):
        a = self._a_double
        u = 1.0 + zs[None, :] / a[:, None]
        with np.errstate(divide="ignore"):
            logs = np.log(np.abs(u))
        finite = np.isfinite(logs)
        nz = np.sum(~finite, axis=0)
        log_p = np.sum(np.where(finite, logs, 0.0), axis=0)
        arg_p = np.sum(np.angle(u), axis=0)
        logmag = np.full(len(zs), -np.inf)
        arg = np.zeros(len(zs))
        loss = np.zeros(len(zs))

        one = nz == 1
        if np.any(one):
            hit = ~finite[:, one]
            logmag[one] = log_p[one] - np.sum(np.where(hit, np.log(np.abs(a))[:, None], 0.0), axis=0)
            arg[one] = arg_p[one] - np.sum(np.where(hit, np.angle(a)[:, None], 0.0), axis=0)

        clear = nz == 0
        if np.any(clear):
            d = zs[None, clear] + a[:, None]
            ls, as_, lost = log_sum(-np.log(np.abs(d)), -np.angle(d))
            logmag[clear] = log_p[clear] + ls
            arg[clear] = arg_p[clear] + as_
            loss[clear] = lost
        return LogArray.of(logmag, wrap(arg), loss)

    def _mp(self, ctx, z):
        a = [ctx.convert(x) for x in self.a]
        u = [1 + z / x for x in a]
        zero = [k for k, v in enumerate(u) if v == 0]
        if len(zero) > 1:
            return ctx.mpc(0)
        if zero:
            k = zero[0]
            out = 1 / a[k]
            for j, v in enumerate(u):
                if j != k:
                    out *= v
            return out
        p = ctx.mpc(1)
        for v in u:
            p *= v
        return p * _checked_fsum(ctx, [1 / (z + x) for x in a])

    def _deriv(self):
        return FactorProductSecondDerivative(self.a)

    def _registry(self):
        # zeros of P' are not known in closed form
        return PoleZeroRegistry.build(complete=False)


@dataclass(frozen=True)
class FactorProductSecondDerivative(FunctionExpr):
    """P''(z) = P(z) (S(z)^2 - S_2(z)) with S = sum 1/(z + A_k), S_2 = sum 1/(z + A_k)^2.

    Expanded by factors, P'' = sum over ordered pairs j != k of
    prod_{i != j, k} (1 + z/A_i) / (A_j A_k). At a zero of one factor k this is
    2 prod_{i != k} (1 + z/A_i) / A_k * sum_{j != k} 1/(z + A_j); at the common
    zero of two factors k, l it is 2 prod_{i != k, l} (1 + z/A_i) / (A_k A_l).
    """
    a: Tuple[Any, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(num(x) for x in self.a))

    @cached_property
    def _a_double(self) -> np.ndarray:
        return np.array([to_double(x) for x in self.a], dtype=complex)

    def _arr(self, zs):
        a = self._a_double
        u = 1.0 + zs[None, :] / a[:, None]
        with np.errstate(divide="ignore"):
            logs = np.log(np.abs(u))
        finite = np.isfinite(logs)
        nz = np.sum(~finite, axis=0)
        log_p = np.sum(np.where(finite, logs, 0.0), axis=0)
        arg_p = np.sum(np.angle(u), axis=0)
        log_a = np.log(np.abs(a))[:, None]
        arg_a = np.angle(a)[:, None]
        logmag = np.full(len(zs), -np.inf)
        arg = np.zeros(len(zs))
        loss = np.zeros(len(zs))

        d = zs[None, :] + a[:, None]
        with np.errstate(divide="ignore"):
            inv_log = np.where(finite, -np.log(np.abs(d)), -np.inf)
        inv_arg = np.where(finite, -np.angle(d), 0.0)

        two = nz == 2
        if np.any(two):
            hit = ~finite[:, two]
            logmag[two] = math.log(2) + log_p[two] - np.sum(np.where(hit, log_a, 0.0), axis=0)
            arg[two] = arg_p[two] - np.sum(np.where(hit, arg_a, 0.0), axis=0)

        one = nz == 1
        if np.any(one):
            hit = ~finite[:, one]
            ls, as_, lost = log_sum(inv_log[:, one], inv_arg[:, one])
            logmag[one] = math.log(2) + log_p[one] - np.sum(np.where(hit, log_a, 0.0), axis=0) + ls
            arg[one] = arg_p[one] - np.sum(np.where(hit, arg_a, 0.0), axis=0) + as_
            loss[one] = lost

        clear = nz == 0
        if np.any(clear):
            ls, as_, lost1 = log_sum(inv_log[:, clear], inv_arg[:, clear])
            ls2, as2, lost2 = log_sum(2.0 * inv_log[:, clear], 2.0 * inv_arg[:, clear])
            # S^2 - S_2
            lq, aq, lost = log_sum(np.stack([2.0 * ls, ls2]), np.stack([2.0 * as_, as2 + math.pi]))
            logmag[clear] = log_p[clear] + lq
            arg[clear] = arg_p[clear] + aq
            loss[clear] = lost + np.maximum(lost1, lost2)
        return LogArray.of(logmag, wrap(arg), loss)

    def _mp(self, ctx, z):
        a = [ctx.convert(x) for x in self.a]
        u = [1 + z / x for x in a]
        zero = [k for k, v in enumerate(u) if v == 0]
        if len(zero) > 2:
            return ctx.mpc(0)
        rest = ctx.mpc(2)
        for j, v in enumerate(u):
            if j not in zero:
                rest *= v
        for k in zero:
            rest /= a[k]
        if len(zero) == 2:
            return rest
        if len(zero) == 1:
            terms = [1 / (z + x) for j, x in enumerate(a) if j != zero[0]]
            return rest * _checked_fsum(ctx, terms)
        s = _checked_fsum(ctx, [1 / (z + x) for x in a])
        s2 = _checked_fsum(ctx, [1 / (z + x) ** 2 for x in a])
        return (rest / 2) * _checked_fsum(ctx, [s * s, -s2])

    def _deriv(self):
        # P''' = P'' S + 2 P' S' + P S''
        s = _log_derivative(self.a)
        ds = s._deriv()
        return Sum((Product((self, s)), Product((Const(2), FactorProductDerivative(self.a), ds)),
                    Product((FactorProduct(self.a), ds._deriv()))))

    def _registry(self):
        return PoleZeroRegistry.build(complete=False)


@dataclass(frozen=True)
class GroupedPartialFractions(FunctionExpr):
    """sum_k c_k / (z - p_k)^m_k over distinct poles p_k"""
    terms: Tuple[Tuple[Any, Any, int], ...] = ()

    def __post_init__(self):
        terms = []
        for t in self.terms:
            coeff, pole = t[0], t[1]
            order = t[2] if len(t) > 2 else 1
            if order < 1:
                raise ValueError(f"pole order must be positive, got {order}")
            terms.append((num(coeff), num(pole), int(order)))
        poles = [p for _, p, _ in terms]
        if len(set(poles)) != len(poles):
            raise ValueError("GroupedPartialFractions poles must be distinct")
        object.__setattr__(self, "terms", tuple(terms))

    @cached_property
    def _double(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        coeffs = np.array([to_double(c) for c, _, _ in self.terms], dtype=complex)
        logc = np.array([log_abs(c) for c, _, _ in self.terms])
        poles = np.array([to_double(p) for _, p, _ in self.terms], dtype=complex)
        orders = np.array([m for _, _, m in self.terms], dtype=float)
        return logc, np.angle(coeffs), poles, orders

    def _arr(self, zs):
        if not self.terms:
            return LogArray.of(np.full(len(zs), -np.inf), np.zeros(len(zs)))
        logc, argc, poles, orders = self._double
        _pole_distance_guard(zs, poles)
        d = zs[None, :] - poles[:, None]
        logmags = logc[:, None] - orders[:, None] * np.log(np.abs(d))
        args = argc[:, None] - orders[:, None] * np.angle(d)
        logmag, arg, loss = log_sum(logmags, args)
        return LogArray.of(logmag, arg, loss)

    def _mp(self, ctx, z):
        values = []
        for c, p, m in self.terms:
            d = z - ctx.convert(p)
            if d == 0:
                raise PoleHit(complex(z), complex(p))
            values.append(ctx.convert(c) / d ** m)
        if not values:
            return ctx.mpc(0)
        total = ctx.fsum(values)
        top = max(abs(v) for v in values)
        if total == 0 or top == 0:
            return ctx.mpc(0)
        lost = float(ctx.log(top / abs(total)))
        if lost > lost_budget(ctx.prec):
            raise PrecisionLoss(lost, lost_budget(ctx.prec), ctx.prec)
        return total

    def _deriv(self):
        terms = tuple((-m * c, p, m + 1) for c, p, m in self.terms if c != 0)
        return GroupedPartialFractions(terms) if terms else Const(0)

    def _registry(self):
        live = [(to_double(p), m) for c, p, m in self.terms if c != 0]
        # a single term has no zeros; several terms have zeros we cannot list
        return PoleZeroRegistry.build(poles=live, complete=len(live) <= 1)


@dataclass(frozen=True)
class PowerCompose(FunctionExpr):
    """z -> child(z^k)"""
    child: FunctionExpr = field(default_factory=Var)
    k: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"PowerCompose power must be positive, got {self.k}")

    def _arr(self, zs):
        return self.child._arr(zs ** self.k)

    def _mp(self, ctx, z):
        return self.child._mp(ctx, z ** self.k)

    def _deriv(self):
        d = self.child._deriv()
        if is_zero(d):
            return Const(0)
        inner = PowerCompose(d, self.k) if not isinstance(d, Const) else d
        if self.k == 1:
            return inner
        power = Var() if self.k == 2 else Monomial(self.k - 1)
        return Product((Const(self.k), power, inner))

    def _registry(self):
        ctx = mp_context(DEFAULT_BITS)
        zeros, poles = [], []
        for e in self.child.reg.entries:
            if e.location == 0:
                roots = [(0j, e.multiplicity * self.k)]
            else:
                a = ctx.mpc(e.location)
                r = abs(a) ** (ctx.mpf(1) / self.k)
                t = ctx.arg(a)
                roots = [(complex(r * ctx.expj((t + 2 * ctx.pi * j) / self.k)), e.multiplicity)
                         for j in range(self.k)]
            (zeros if e.kind == "zero" else poles).extend(roots)
        base = self.child.reg
        return PoleZeroRegistry.build(zeros=zeros, poles=poles, complete=base.complete,
                                      poles_exact=base.poles_exact)


def evaluate_array(expr: FunctionExpr, zs: Union[Sequence[complex], np.ndarray], bits: int = DEFAULT_BITS,
                   escalation_nats: float = ESCALATION_NATS) -> LogArray:
    """Evaluate at many points; points that cancelled past escalation_nats are recomputed at `bits` of precision."""
    zs = np.asarray(zs, dtype=complex).ravel()
    blocks = []
    for start in range(0, len(zs), CHUNK):
        block = zs[start:start + CHUNK]
        with np.errstate(divide="ignore", invalid="ignore"):
            res = expr._arr(block)
        escalate = res.loss > escalation_nats
        if np.any(escalate):
            ctx = mp_context(bits)
            for i in np.flatnonzero(escalate):
                v = LogComplex.from_mp(ctx, expr._mp(ctx, ctx.mpc(complex(block[i]))))
                res.logmag[i] = v.logmag
                res.arg[i] = v.arg
            res.loss[escalate] = 0.0
        blocks.append(res)
    if not blocks:
        return LogArray.of(np.zeros(0), np.zeros(0))
    return LogArray.of(np.concatenate([b.logmag for b in blocks]),
                       np.concatenate([b.arg for b in blocks]))


def evaluate(expr: FunctionExpr, z: complex, bits: int = DEFAULT_BITS,
             escalation_nats: float = ESCALATION_NATS) -> LogComplex:
    return evaluate_array(expr, [z], bits, escalation_nats)[0]


def evaluate_mp(expr: FunctionExpr, z: Any, bits: int = DEFAULT_BITS):
    """Value at z as an mpc of the calling thread's `bits`-precision context."""
    ctx = mp_context(bits)
    return expr._mp(ctx, ctx.convert(z))


def differentiate(expr: FunctionExpr) -> FunctionExpr:
    return expr._deriv()


def shift(expr: FunctionExpr, c: Any) -> FunctionExpr:
    """z -> expr(z + c); nested shifts fold into one."""
    c = num(c)
    if c == 0:
        return expr
    if isinstance(expr, Shift):
        total = expr.c + c
        return expr.child if total == 0 else Shift(expr.child, total)
    if isinstance(expr, Const):
        return expr
    return Shift(expr, c)


def registry(expr: FunctionExpr, strict: bool = False) -> PoleZeroRegistry:
    """
    Known zeros and poles. Sums make the zero set underivable: the registry is
    then incomplete (poles only), and strict mode raises Unknowable carrying it.
    """
    reg = expr.reg
    if strict and not reg.complete:
        raise Unknowable("zero set of a sum is not algebraically derivable", partial=reg)
    return reg


def polynomial(coeffs: Iterable[Any]) -> FunctionExpr:
    """a_0 + a_1 z + ... as a tree; convenience for tests and the corpus."""
    terms: List[FunctionExpr] = []
    for k, a in enumerate(coeffs):
        a = num(a)
        if a == 0:
            continue
        if k == 0:
            terms.append(Const(a))
            continue
        power = Var() if k == 1 else Monomial(k)
        terms.append(power if a == 1 else Product((Const(a), power)))
    if not terms:
        return Const(0)
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))


def linear_factors(roots: Iterable[complex], multiplicities: Iterable[int] = ()) -> FunctionExpr:
    """prod (z - a_j)^{m_j} with exact registry entries."""
    mults = list(multiplicities)
    factors: List[FunctionExpr] = []
    for j, a in enumerate(roots):
        m = mults[j] if j < len(mults) else 1
        base = Var() if m == 1 else Monomial(m)
        factors.append(shift(base, -num(a)))
    if not factors:
        return Const(1)
    return factors[0] if len(factors) == 1 else Product(tuple(factors))
