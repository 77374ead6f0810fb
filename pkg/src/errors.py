"""
Exception hierarchy. Every error raised by the numerical modules derives from
ZeroDiffError so the experiment runner can turn it into a named check failure.
"""
import math
from typing import Any, Optional, Tuple


class ZeroDiffError(Exception):
    pass


class PreconditionViolation(ZeroDiffError):
    pass


class ExprSyntaxError(ZeroDiffError):
    def __init__(self, message: str, position: int = -1):
        super().__init__(f"{message} (at token {position})" if position >= 0 else message)
        self.position = position


# evaluation

class PoleHit(ZeroDiffError):
    def __init__(self, z: complex, pole: Optional[complex] = None):
        super().__init__(f"evaluation at {z} hits pole {pole}")
        self.z = z
        self.pole = pole


class PrecisionLoss(ZeroDiffError):
    def __init__(self, lost_nats: float, budget: float, bits: int):
        super().__init__(f"cancellation lost {lost_nats:.1f} nats (budget {budget:.1f}) at {bits} bits")
        self.lost_nats = lost_nats
        self.budget = budget
        self.bits = bits


class Unknowable(ZeroDiffError):
    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


class Overflow(ZeroDiffError):
    def __init__(self, logmag: float, arg: float):
        super().__init__(f"logmag {logmag} exceeds the double range")
        self.logmag = logmag
        self.arg = arg

    @property
    def indicator(self) -> complex:
        re = math.cos(self.arg)
        im = math.sin(self.arg)
        return complex(math.copysign(math.inf, re) if abs(re) > 1e-300 else 0.0,
                       math.copysign(math.inf, im) if abs(im) > 1e-300 else 0.0)


# contours and quadrature

class BoundaryHit(ZeroDiffError):
    def __init__(self, point: complex, distance: float):
        super().__init__(f"registered point {point} lies {distance:.3e} from the contour")
        self.point = point
        self.distance = distance


class NonConvergent(ZeroDiffError):
    def __init__(self, message: str, last: Tuple[float, float] = (float("nan"), float("nan"))):
        super().__init__(f"{message}; last estimates {last[0]!r}, {last[1]!r}")
        self.last = last


class PoleOnCircle(ZeroDiffError):
    def __init__(self, r: float, pole: complex):
        super().__init__(f"circle |z| = {r} passes within margin of {pole}")
        self.r = r
        self.pole = pole


class ZeroOnCircle(ZeroDiffError):
    def __init__(self, r: float, zero: Optional[complex] = None):
        super().__init__(f"circle |z| = {r} passes within margin of zero {zero}")
        self.r = r
        self.zero = zero


# growth functionals

class IncompleteRegistry(ZeroDiffError):
    pass


class InsufficientGrid(ZeroDiffError):
    pass


class NoAdmissibleRadius(ZeroDiffError):
    def __init__(self, r: float):
        super().__init__(f"no pole-avoiding radius within 2% of {r}")
        self.r = r


class DivergentEpsilonSum(ZeroDiffError):
    pass


class AllExcluded(ZeroDiffError):
    def __init__(self, r: float):
        super().__init__(f"circle |z| = {r} lies entirely inside the exceptional set")
        self.r = r


class NoZeros(ZeroDiffError):
    def __init__(self, r: float):
        super().__init__(f"no zeros in |z| <= {r}")
        self.r = r


# power series

class PoleInDisk(ZeroDiffError):
    def __init__(self, r: float, pole: complex):
        super().__init__(f"pole {pole} inside extraction disk |z| <= {r}")
        self.r = r
        self.pole = pole


class WindowTooShort(ZeroDiffError):
    def __init__(self, index: int, length: int):
        super().__init__(f"maximal term at index {index} of a window of {length} coefficients")
        self.index = index
        self.length = length


class FlatModulus(ZeroDiffError):
    pass


# construction

class DegenerateZero(ZeroDiffError):
    pass


class IdentityFailure(ZeroDiffError):
    def __init__(self, identity: str, z: Any, lhs: Any, rhs: Any, error: float):
        super().__init__(f"identity {identity} fails at z={z}: {lhs} vs {rhs} (error {error:.3e})")
        self.identity = identity
        self.z = z
        self.lhs = lhs
        self.rhs = rhs
        self.error = error


# runner

class ConfigError(ZeroDiffError):
    pass


class UnknownReport(ZeroDiffError):
    pass
