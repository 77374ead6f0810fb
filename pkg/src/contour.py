"""
Argument-principle counting on circles and axis-aligned rectangles, and
quadtree localisation of zeros.
"""
import csv
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import BoundaryHit, NonConvergent, PreconditionViolation
from src.expr import Const, FunctionExpr, evaluate_array
from src.logcomplex import wrap
from src.registry import PoleZeroRegistry
from util.log import Log

log = Log("contour")

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# refinement stops once every phase step is below this
SAFE_STEP = math.pi / 2


@dataclass(frozen=True)
class Circle:
    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Rectangle:
    lo: complex = -1 - 1j
    hi: complex = 1 + 1j

    def __post_init__(self):
        lo, hi = complex(self.lo), complex(self.hi)
        if not (hi.real > lo.real and hi.imag > lo.imag):
            raise ValueError(f"degenerate rectangle {lo} .. {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi.real - self.lo.real

    @property
    def height(self) -> float:
        return self.hi.imag - self.lo.imag

    @property
    def center(self) -> complex:
        return 0.5 * (self.lo + self.hi)

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    def corners(self) -> List[complex]:
        lo, hi = self.lo, self.hi
        return [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)]


@dataclass(frozen=True)
class Contour:
    shape: Union[Circle, Rectangle] = field(default_factory=Circle)
    orientation: int = 1

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation is +1 or -1")

    @classmethod
    def circle(cls, radius: float, center: complex = 0j) -> "Contour":
        return cls(Circle(center, radius))

    @classmethod
    def rectangle(cls, lo: complex, hi: complex) -> "Contour":
        return cls(Rectangle(lo, hi))

    def reversed(self) -> "Contour":
        return replace(self, orientation=-self.orientation)

    @property
    def scale(self) -> float:
        s = self.shape
        return s.radius if isinstance(s, Circle) else s.diameter

    def point(self, t: np.ndarray) -> np.ndarray:
        """Position at parameter t in [0, 1), traversed in the contour's orientation."""
        t = np.asarray(t, dtype=float)
        if self.orientation < 0:
            t = (1.0 - t) % 1.0
        s = self.shape
        if isinstance(s, Circle):
            return s.center + s.radius * np.exp(2j * np.pi * t)
        corners = s.corners()
        sides = [abs(corners[(i + 1) % 4] - corners[i]) for i in range(4)]
        bounds = np.cumsum([0.0] + sides) / sum(sides)
        out = np.empty(t.shape, dtype=complex)
        for i in range(4):
            m = (t >= bounds[i]) & (t < bounds[i + 1]) if i < 3 else (t >= bounds[i])
            u = (t[m] - bounds[i]) / (bounds[i + 1] - bounds[i])
            out[m] = corners[i] + u * (corners[(i + 1) % 4] - corners[i])
        return out

    def distance(self, p: complex) -> float:
        s = self.shape
        if isinstance(s, Circle):
            return abs(abs(p - s.center) - s.radius)
        x = min(max(p.real, s.lo.real), s.hi.real)
        y = min(max(p.imag, s.lo.imag), s.hi.imag)
        if self.contains(p):
            return min(p.real - s.lo.real, s.hi.real - p.real, p.imag - s.lo.imag, s.hi.imag - p.imag)
        return abs(p - complex(x, y))

    def contains(self, p: complex) -> bool:
        s = self.shape
        if isinstance(s, Circle):
            return abs(p - s.center) < s.radius
        return s.lo.real < p.real < s.hi.real and s.lo.imag < p.imag < s.hi.imag


@dataclass(frozen=True)
class CountResult:
    net: int
    phase_steps: int
    refined: bool
    residual: float = 0.0


def _guard(reg: PoleZeroRegistry, c: Contour):
    tol = 1e-9 * max(c.scale, 1e-300)
    for e in reg.entries:
        d = c.distance(e.location)
        if d <= tol:
            raise BoundaryHit(e.location, d)


def winding_count(f: FunctionExpr, c: Contour, budget: int = 2 ** 20, start: int = 256) -> CountResult:
    """Net winding of f around c: zeros minus poles enclosed, with multiplicity."""
    if isinstance(f, Const):
        if f.c == 0:
            raise PreconditionViolation("winding of the zero function")
        return CountResult(0, start, False)
    _guard(f.reg, c)
    t = np.arange(start) / start
    args = _phases(f, c, t)
    refined = False
    while True:
        steps = wrap(np.diff(np.append(args, args[0])))
        bad = np.flatnonzero(np.abs(steps) >= SAFE_STEP)
        if not len(bad):
            break
        if len(t) + len(bad) > budget:
            raise NonConvergent(f"phase refinement exceeded {budget} samples", (float(len(t)), float(len(bad))))
        refined = True
        nxt = np.append(t, 1.0)
        mids = 0.5 * (t[bad] + nxt[bad + 1])
        new_args = _phases(f, c, mids)
        t = np.insert(t, bad + 1, mids)
        args = np.insert(args, bad + 1, new_args)
    turns = float(np.sum(steps)) / (2.0 * math.pi)
    net = int(round(turns))
    residual = abs(turns - net)
    if residual >= 0.1:
        raise NonConvergent("winding is not close to an integer", (turns, float(net)))
    return CountResult(net, len(t), refined, residual)


def _phases(f: FunctionExpr, c: Contour, t: np.ndarray) -> np.ndarray:
    zs = c.point(t)
    values = evaluate_array(f, zs)
    if np.any(np.isneginf(values.logmag)):
        i = int(np.argmax(np.isneginf(values.logmag)))
        raise BoundaryHit(complex(zs[i]), 0.0)
    return values.arg


def confirmed_poles(f: FunctionExpr, inside) -> List[Tuple[complex, int]]:
    """
    Poles of f satisfying inside(location). Registries with inexact pole lists
    have each candidate checked by the winding on a small circle around it.
    """
    reg = f.reg
    candidates = [e for e in reg.poles() if inside(e.location)]
    if reg.poles_exact:
        return [(e.location, e.multiplicity) for e in candidates]
    others = [e.location for e in reg.entries]
    out = []
    for e in candidates:
        gaps = [abs(e.location - o) for o in others if o != e.location]
        rho = 0.25 * min(gaps + [1.0])
        rho = max(rho, 1e-6 * (1.0 + abs(e.location)))
        net = winding_count(f, Contour.circle(rho, e.location)).net
        if net < 0:
            out.append((e.location, -net))
    return out


def count_zeros(f: FunctionExpr, c: Contour, poles: Optional[Sequence[Tuple[complex, int]]] = None) -> int:
    """Zeros inside c: net winding plus the poles inside."""
    net = winding_count(f, c).net * c.orientation
    if poles is None:
        inside = confirmed_poles(f, c.contains)
    else:
        inside = [(p, m) for p, m in poles if c.contains(p)]
    return net + sum(m for _, m in inside)


def count_zeros_in_disk(f: FunctionExpr, r: float, center: complex = 0j) -> int:
    with log.trace("count_zeros_in_disk", r=float(r)):
        return count_zeros(f, Contour.circle(r, center))


@dataclass(frozen=True)
class ZeroBox:
    box: Rectangle
    count: int
    resolved: bool

    @property
    def center(self) -> complex:
        return self.box.center

    @property
    def box_radius(self) -> float:
        return 0.5 * self.box.diameter


class _Jitter:
    """Deterministic golden-ratio offsets in [-0.5, 0.5)."""

    def __init__(self):
        self.k = 0

    def __call__(self) -> float:
        self.k += 1
        return (self.k * GOLDEN) % 1.0 - 0.5


def locate_zeros(f: FunctionExpr, box: Rectangle, max_depth: int = 40, tol: float = 1e-8,
                 poles: Optional[Sequence[Tuple[complex, int]]] = None, retries: int = 8) -> List[ZeroBox]:
    """
    Quadtree subdivision of box down to leaves of diameter below tol that hold
    zeros. Leaves at max_depth are returned unresolved. Leaf counts add up to
    the zero count of box.
    """
    pole_list = list(poles) if poles is not None else confirmed_poles(
        f, lambda p: box.lo.real <= p.real <= box.hi.real and box.lo.imag <= p.imag <= box.hi.imag)
    jitter = _Jitter()

    def zeros_in(b: Rectangle) -> int:
        return count_zeros(f, Contour(b), [(p, m) for p, m in pole_list])

    def split(b: Rectangle) -> List[Tuple[Rectangle, int]]:
        for _ in range(retries):
            mx = b.center.real + 0.01 * b.width * jitter()
            my = b.center.imag + 0.01 * b.height * jitter()
            quads = [Rectangle(b.lo, complex(mx, my)),
                     Rectangle(complex(mx, b.lo.imag), complex(b.hi.real, my)),
                     Rectangle(complex(b.lo.real, my), complex(mx, b.hi.imag)),
                     Rectangle(complex(mx, my), b.hi)]
            try:
                return [(q, zeros_in(q)) for q in quads]
            except (BoundaryHit, NonConvergent) as e:
                log.debug("subdivision line hit a singularity, jittering", error=str(e))
        raise NonConvergent(f"could not subdivide box {b.lo}..{b.hi}")

    with log.trace("locate_zeros", max_depth=max_depth):
        total = zeros_in(box)
        leaves: List[ZeroBox] = []
        stack = [(box, total, 0)]
        while stack:
            b, count, depth = stack.pop()
            if count <= 0:
                continue
            if b.diameter < tol:
                leaves.append(ZeroBox(b, count, True))
                continue
            if depth >= max_depth:
                leaves.append(ZeroBox(b, count, False))
                continue
            children = split(b)
            if sum(n for _, n in children) != count:
                # a zero sits too close to a split line to be counted reliably
                log.warning("child counts disagree with parent", parent=count,
                            children=[n for _, n in children])
                leaves.append(ZeroBox(b, count, False))
                continue
            stack.extend((q, n, depth + 1) for q, n in children)
    return sorted(leaves, key=lambda z: (z.center.real, z.center.imag))


def write_zero_csv(leaves: Iterable[ZeroBox], path: str):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im", "box_radius", "count"])
        for z in leaves:
            w.writerow([repr(z.center.real), repr(z.center.imag), repr(z.box_radius), z.count])
