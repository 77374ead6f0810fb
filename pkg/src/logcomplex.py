"""
Overflow-safe complex values held as (log-modulus, argument).

LogComplex is the scalar form returned by evaluate(); LogArray is the vectorised
form used by the evaluation kernels. Products add logmags and wrap args, so no
intermediate ever overflows; only sums touch linear values, after rescaling by
the largest addend.
"""
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from src.errors import Overflow

# largest logmag a double can exponentiate
OVERFLOW_LOGMAG = 709.782712893384


def wrap(arg):
    """Map angles into (-pi, pi]."""
    return math.pi - np.mod(math.pi - arg, 2 * math.pi)


def wrap_scalar(arg: float) -> float:
    return math.pi - math.fmod(math.fmod(math.pi - arg, 2 * math.pi) + 2 * math.pi, 2 * math.pi)


@dataclass(frozen=True)
class LogComplex:
    logmag: float
    arg: float = 0.0

    def __post_init__(self):
        if self.logmag == -math.inf:
            object.__setattr__(self, "arg", 0.0)
        elif not -math.pi < self.arg <= math.pi:
            object.__setattr__(self, "arg", wrap_scalar(self.arg))

    @classmethod
    def zero(cls) -> "LogComplex":
        return cls(-math.inf, 0.0)

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        if z == 0:
            return cls.zero()
        return cls(math.log(abs(z)), math.atan2(z.imag, z.real))

    @classmethod
    def from_mp(cls, ctx, v) -> "LogComplex":
        if v == 0:
            return cls.zero()
        return cls(float(ctx.log(abs(v))), float(ctx.arg(v)))

    @property
    def is_zero(self) -> bool:
        return self.logmag == -math.inf

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero or other.is_zero:
            return LogComplex.zero()
        return LogComplex(self.logmag + other.logmag, wrap_scalar(self.arg + other.arg))

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        if other.is_zero:
            raise ZeroDivisionError("division by a zero LogComplex")
        if self.is_zero:
            return LogComplex.zero()
        return LogComplex(self.logmag - other.logmag, wrap_scalar(self.arg - other.arg))

    def __pow__(self, k: int) -> "LogComplex":
        if self.is_zero:
            return LogComplex.zero() if k > 0 else LogComplex(0.0)
        return LogComplex(k * self.logmag, wrap_scalar(k * self.arg))

    def scaled(self, c: complex) -> "LogComplex":
        return self * LogComplex.from_complex(c)

    def log_plus(self) -> float:
        return max(self.logmag, 0.0)

    def to_complex(self) -> complex:
        return to_complex(self)


def to_complex(v: LogComplex) -> complex:
    """exp(logmag)(cos arg + i sin arg); Overflow beyond the double range."""
    if v.logmag == -math.inf:
        return 0j
    if v.logmag > OVERFLOW_LOGMAG:
        raise Overflow(v.logmag, v.arg)
    mag = math.exp(v.logmag)
    return complex(mag * math.cos(v.arg), mag * math.sin(v.arg))


def relative_deviation(a: LogComplex, b: LogComplex) -> float:
    """|a/b - 1| computed from the log difference, so huge or tiny values compare exactly."""
    if b.is_zero:
        return 0.0 if a.is_zero else math.inf
    if a.is_zero:
        return 1.0
    x = a.logmag - b.logmag
    y = wrap_scalar(a.arg - b.arg)
    if x > OVERFLOW_LOGMAG:
        return math.inf
    # e^(x+iy) - 1 = expm1(x) cos y + (cos y - 1) + i e^x sin y
    s = math.sin(0.5 * y)
    re = math.expm1(x) * math.cos(y) - 2.0 * s * s
    im = math.exp(x) * math.sin(y)
    return math.hypot(re, im)


@dataclass
class LogArray:
    logmag: np.ndarray
    arg: np.ndarray
    # nats of significance lost to cancellation, accumulated along the tree
    loss: np.ndarray

    @classmethod
    def of(cls, logmag, arg, loss: Optional[np.ndarray] = None) -> "LogArray":
        logmag = np.asarray(logmag, dtype=float)
        arg = np.where(np.isneginf(logmag), 0.0, np.asarray(arg, dtype=float))
        if loss is None:
            loss = np.zeros(logmag.shape)
        return cls(logmag, arg, np.asarray(loss, dtype=float))

    @classmethod
    def from_complex(cls, values: np.ndarray) -> "LogArray":
        values = np.asarray(values, dtype=complex)
        with np.errstate(divide="ignore"):
            logmag = np.log(np.abs(values))
        return cls.of(logmag, np.angle(values))

    @classmethod
    def constant(cls, value: LogComplex, n: int) -> "LogArray":
        return cls.of(np.full(n, value.logmag), np.full(n, value.arg))

    def __len__(self) -> int:
        return len(self.logmag)

    def __getitem__(self, i: int) -> LogComplex:
        return LogComplex(float(self.logmag[i]), float(self.arg[i]))

    def __mul__(self, other: "LogArray") -> "LogArray":
        zero = np.isneginf(self.logmag) | np.isneginf(other.logmag)
        logmag = np.where(zero, -np.inf, self.logmag + other.logmag)
        return LogArray.of(logmag, wrap(self.arg + other.arg), np.maximum(self.loss, other.loss))

    def reciprocal(self) -> "LogArray":
        return LogArray.of(-self.logmag, wrap(-self.arg), self.loss.copy())

    def items(self) -> Iterable[LogComplex]:
        for i in range(len(self)):
            yield self[i]

    def to_complex(self) -> np.ndarray:
        if np.any(self.logmag > OVERFLOW_LOGMAG):
            i = int(np.argmax(self.logmag))
            raise Overflow(float(self.logmag[i]), float(self.arg[i]))
        return np.exp(self.logmag) * (np.cos(self.arg) + 1j * np.sin(self.arg))


def neumaier(terms: np.ndarray) -> np.ndarray:
    """Compensated sum along axis 0 (real arrays)."""
    s = terms[0].copy()
    c = np.zeros_like(s)
    for t in terms[1:]:
        tt = s + t
        c += np.where(np.abs(s) >= np.abs(t), (s - tt) + t, (t - tt) + s)
        s = tt
    return s + c


def log_sum(logmags: np.ndarray, args: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Sum addends given as (n_terms, n_points) log arrays. Returns (logmag, arg,
    loss) per point, loss being how many nats the result fell below the largest
    addend (inf for an exact zero out of nonzero addends).
    """
    top = np.max(logmags, axis=0)
    finite = np.isfinite(top)
    shift = np.where(finite, top, 0.0)
    with np.errstate(invalid="ignore", over="ignore"):
        scale = np.where(np.isneginf(logmags), 0.0, np.exp(logmags - shift))
    re = neumaier(scale * np.cos(args))
    im = neumaier(scale * np.sin(args))
    with np.errstate(divide="ignore"):
        rel = np.log(np.hypot(re, im))
    logmag = np.where(finite, shift + rel, -np.inf)
    loss = np.where(finite, np.maximum(-rel, 0.0), 0.0)
    return logmag, np.arctan2(im, re), loss


def relative_deviation_array(a: LogArray, b: LogArray) -> np.ndarray:
    """Vectorised relative_deviation."""
    za, zb = np.isneginf(a.logmag), np.isneginf(b.logmag)
    with np.errstate(invalid="ignore", over="ignore"):
        x = np.where(za | zb, 0.0, a.logmag - b.logmag)
        y = wrap(a.arg - b.arg)
        s = np.sin(0.5 * y)
        re = np.expm1(x) * np.cos(y) - 2.0 * s * s
        im = np.exp(x) * np.sin(y)
        dev = np.hypot(re, im)
    dev = np.where(zb, np.where(za, 0.0, np.inf), np.where(za, 1.0, dev))
    return dev
