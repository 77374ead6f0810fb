"""Named function builders referenced from experiment configs."""
from math import factorial
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.counterexample import OneZeroSpec, build_bundle
from src.errors import ConfigError
from src.expr import FactorProduct, FunctionExpr, GroupedPartialFractions, Quotient, linear_factors, polynomial
from src.precision import num
from src.serial import parse

Builder = Callable[..., FunctionExpr]
BUILDERS: Dict[str, Builder] = {}


def builder(name: str):
    def register(fn: Builder) -> Builder:
        BUILDERS[name] = fn
        return fn
    return register


@builder("order_third_product")
def order_third_product(K: int = 200) -> FunctionExpr:
    """prod (1 + z/k^3): entire, order 1/3, zeros at -k^3."""
    return FactorProduct(tuple(k ** 3 for k in range(1, K + 1)))


@builder("exp_series")
def exp_series(terms: int = 60) -> FunctionExpr:
    """Taylor polynomial of exp."""
    return polynomial([num(1) / factorial(k) for k in range(terms)])


@builder("lattice_fractions")
def lattice_fractions(K: int = 40, weight_power: int = 2) -> FunctionExpr:
    """sum k^-weight_power / (z + k^2)."""
    return GroupedPartialFractions(tuple((num(1) / k ** weight_power, -k * k, 1) for k in range(1, K + 1)))


@builder("log_squared_quotient")
def log_squared_quotient(K: int = 30) -> FunctionExpr:
    """prod (1 + z/2^k) / prod (1 - z/3^k): characteristic of order (log r)^2."""
    return Quotient(FactorProduct(tuple(2 ** k for k in range(1, K + 1))),
                    FactorProduct(tuple(-(3 ** k) for k in range(1, K + 1))))


@builder("polynomial")
def polynomial_builder(coeffs: Sequence[Any] = (0, 0, 1)) -> FunctionExpr:
    return polynomial(coeffs)


@builder("rational")
def rational(zeros: Sequence[complex] = (), poles: Sequence[complex] = (), zero_mult: Sequence[int] = (),
             pole_mult: Sequence[int] = ()) -> FunctionExpr:
    num_ = linear_factors([complex(z) for z in zeros], zero_mult)
    if not poles:
        return num_
    return Quotient(num_, linear_factors([complex(p) for p in poles], pole_mult))


@builder("counterexample_f")
def counterexample_f(n_seq: Sequence[int] = (2, 10, 60), ratio_floor: float = 4.0) -> FunctionExpr:
    return build_bundle(OneZeroSpec(n_seq=list(n_seq), ratio_floor=ratio_floor)).f


@builder("counterexample_g")
def counterexample_g(n_seq: Sequence[int] = (2, 10, 60), ratio_floor: float = 4.0) -> FunctionExpr:
    return build_bundle(OneZeroSpec(n_seq=list(n_seq), ratio_floor=ratio_floor)).g


def random_rational(rng: np.random.Generator, radius: float = 4.0, max_zeros: int = 4, max_poles: int = 3,
                    max_mult: int = 2, separation: float = 0.05) -> FunctionExpr:
    """Rational function with random, well separated zeros and poles in |z| < radius."""
    nz = int(rng.integers(1, max_zeros + 1))
    npl = int(rng.integers(0, max_poles + 1))
    points: List[complex] = []
    while len(points) < nz + npl:
        rho = radius * np.sqrt(rng.uniform())
        z = complex(rho * np.exp(1j * rng.uniform(-np.pi, np.pi)))
        if all(abs(z - p) >= separation for p in points):
            points.append(z)
    mults = [int(m) for m in rng.integers(1, max_mult + 1, nz + npl)]
    return rational(points[:nz], points[nz:], mults[:nz], mults[nz:])


class CorpusEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    builder: Optional[str] = None
    expr: Optional[str] = None
    params: Dict[str, Any] = {}

    @model_validator(mode="after")
    def _one_source(self) -> "CorpusEntry":
        if (self.builder is None) == (self.expr is None):
            raise ValueError(f"corpus entry {self.name!r} needs exactly one of builder or expr")
        if self.expr is not None and self.params:
            raise ValueError(f"corpus entry {self.name!r}: params apply to builders only")
        return self

    def build(self) -> FunctionExpr:
        if self.expr is not None:
            return parse(self.expr)
        fn = BUILDERS.get(self.builder)
        if fn is None:
            raise ConfigError(f"unknown builder {self.builder!r}; known: {sorted(BUILDERS)}")
        try:
            return fn(**self.params)
        except TypeError as e:
            raise ConfigError(f"builder {self.builder!r}: {e}") from e
