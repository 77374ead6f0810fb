"""
Known zeros and poles of an expression, the source of the counting functions
n(r, .) and N(r, .).
"""
import math
from dataclasses import dataclass, replace
from typing import Iterable, List, Literal, Optional, Tuple

Kind = Literal["zero", "pole"]


def merge_tolerance(p: complex) -> float:
    return 1e-12 * (1.0 + abs(p))


@dataclass(frozen=True)
class Entry:
    location: complex
    multiplicity: int
    kind: Kind

    @property
    def modulus(self) -> float:
        return abs(self.location)

    def signed(self) -> int:
        return self.multiplicity if self.kind == "zero" else -self.multiplicity


def _sort_key(e: Entry) -> Tuple[float, float, int]:
    return (abs(e.location), math.atan2(e.location.imag, e.location.real), 0 if e.kind == "zero" else 1)


def _net(entries: Iterable[Tuple[complex, int]]) -> List[Entry]:
    """Merge signed multiplicities (zeros positive, poles negative) at nearby locations."""
    merged: List[List] = []
    for loc, signed in sorted(entries, key=lambda t: (abs(t[0]), t[0].real, t[0].imag)):
        for slot in merged:
            if abs(slot[0] - loc) <= merge_tolerance(loc):
                slot[1] += signed
                break
        else:
            merged.append([loc, signed])
    out = [Entry(loc, abs(m), "zero" if m > 0 else "pole") for loc, m in merged if m != 0]
    return sorted(out, key=_sort_key)


@dataclass(frozen=True)
class PoleZeroRegistry:
    entries: Tuple[Entry, ...] = ()
    # zeros and poles are all listed
    complete: bool = True
    # listed poles are exactly the poles (zeros may be missing)
    poles_exact: bool = True

    @classmethod
    def build(cls, zeros: Iterable[Tuple[complex, int]] = (), poles: Iterable[Tuple[complex, int]] = (),
              complete: bool = True, poles_exact: bool = True) -> "PoleZeroRegistry":
        signed = [(complex(z), m) for z, m in zeros] + [(complex(p), -m) for p, m in poles]
        return cls(tuple(_net(signed)), complete, poles_exact)

    def zeros(self) -> List[Entry]:
        return [e for e in self.entries if e.kind == "zero"]

    def poles(self) -> List[Entry]:
        return [e for e in self.entries if e.kind == "pole"]

    def of_kind(self, kind: Kind) -> List[Entry]:
        return self.zeros() if kind == "zero" else self.poles()

    def count_inside(self, r: float, kind: Kind, center: complex = 0j) -> int:
        return sum(e.multiplicity for e in self.of_kind(kind) if abs(e.location - center) < r)

    def net_inside(self, inside) -> int:
        """zeros - poles over entries for which inside(location) holds."""
        return sum(e.signed() for e in self.entries if inside(e.location))

    def translate(self, c: complex) -> "PoleZeroRegistry":
        moved = [Entry(e.location + c, e.multiplicity, e.kind) for e in self.entries]
        return replace(self, entries=tuple(sorted(moved, key=_sort_key)))

    def max_modulus(self) -> float:
        return max((e.modulus for e in self.entries), default=0.0)

    def nearest(self, z: complex) -> Optional[Entry]:
        return min(self.entries, key=lambda e: abs(e.location - z), default=None)

    def pole_moduli(self) -> List[float]:
        return [e.modulus for e in self.poles()]


def combine(parts: Iterable[PoleZeroRegistry], sign: Iterable[int]) -> List[Entry]:
    """Net entries of a product of parts raised to +-1."""
    signed = []
    for reg, s in zip(parts, sign):
        signed.extend((e.location, s * e.signed()) for e in reg.entries)
    return _net(signed)


def product_registry(regs: List[PoleZeroRegistry]) -> PoleZeroRegistry:
    entries = combine(regs, [1] * len(regs))
    incomplete = [r for r in regs if not r.complete]
    with_poles = [r for r in regs if r.poles()]
    # unknown zeros of one factor could only cancel poles of another
    exact = all(r.poles_exact for r in regs) and (
        not incomplete or (len(incomplete) == 1 and all(r is incomplete[0] for r in with_poles)))
    return PoleZeroRegistry(tuple(entries), complete=not incomplete, poles_exact=exact)


def quotient_registry(num: PoleZeroRegistry, den: PoleZeroRegistry) -> PoleZeroRegistry:
    entries = combine([num, den], [1, -1])
    exact = den.complete and num.poles_exact and (num.complete or not den.zeros())
    return PoleZeroRegistry(tuple(entries), complete=num.complete and den.complete, poles_exact=exact)


def sum_registry(regs: List[PoleZeroRegistry]) -> PoleZeroRegistry:
    """Poles of a sum are inherited from its terms; its zeros are not derivable."""
    poles: List[Tuple[complex, int]] = []
    overlap = False
    for reg in regs:
        for e in reg.poles():
            for i, (loc, m) in enumerate(poles):
                if abs(loc - e.location) <= merge_tolerance(loc):
                    poles[i] = (loc, max(m, e.multiplicity))
                    overlap = True
                    break
            else:
                poles.append((e.location, e.multiplicity))
    exact = all(r.poles_exact for r in regs) and not overlap
    entries = _net([(p, -m) for p, m in poles])
    return PoleZeroRegistry(tuple(entries), complete=False, poles_exact=exact)
