import numpy as np
import pytest
from pydantic import ValidationError

from src.corpus import BUILDERS, CorpusEntry, lattice_fractions, log_squared_quotient, random_rational
from src.errors import ConfigError
from src.expr import evaluate, registry, to_complex


def test_builders_are_registered():
    assert {"order_third_product", "exp_series", "lattice_fractions", "log_squared_quotient", "polynomial",
            "rational", "counterexample_f", "counterexample_g"} <= set(BUILDERS)


def test_entry_from_builder():
    f = CorpusEntry(name="p", builder="polynomial", params={"coeffs": [1, 0, 1]}).build()
    assert to_complex(evaluate(f, 2)) == pytest.approx(5)


def test_entry_from_expression():
    f = CorpusEntry(name="q", expr="(quot (var) (fp 4))").build()
    assert to_complex(evaluate(f, 4)) == pytest.approx(2)


def test_entry_needs_exactly_one_source():
    with pytest.raises(ValidationError):
        CorpusEntry(name="x")
    with pytest.raises(ValidationError):
        CorpusEntry(name="x", builder="polynomial", expr="(var)")
    with pytest.raises(ValidationError):
        CorpusEntry(name="x", expr="(var)", params={"a": 1})


def test_unknown_builder_and_bad_params():
    with pytest.raises(ConfigError):
        CorpusEntry(name="x", builder="nope").build()
    with pytest.raises(ConfigError):
        CorpusEntry(name="x", builder="polynomial", params={"degree": 3}).build()


def test_rational_builder():
    f = BUILDERS["rational"](zeros=[1], poles=[2j], zero_mult=[2])
    reg = registry(f, strict=True)
    assert [(e.location, e.multiplicity, e.kind) for e in reg.entries] == [(1 + 0j, 2, "zero"), (2j, 1, "pole")]


def test_lattice_fractions_poles():
    reg = registry(lattice_fractions(K=5))
    assert sorted(e.modulus for e in reg.poles()) == [1, 4, 9, 16, 25]


def test_log_squared_quotient_registry():
    reg = registry(log_squared_quotient(K=4), strict=True)
    assert len(reg.zeros()) == 4 and len(reg.poles()) == 4


def test_random_rational_is_seeded():
    a = random_rational(np.random.default_rng(5))
    b = random_rational(np.random.default_rng(5))
    assert a == b
    reg = registry(a, strict=True)
    assert 1 <= sum(e.multiplicity for e in reg.zeros()) <= 8
    assert all(e.modulus < 4 for e in reg.entries)
