import math

import pytest

import src.catalogue  # noqa: F401
from src.config import parse_config
from src.experiment import run_experiment
from util.status import Status

CUBIC = {"name": "f", "builder": "order_third_product", "params": {"K": 40}}


def run(data):
    return run_experiment(parse_config(data), write=False)


def names(report):
    return [c.name for c in report.checks]


def errors(report):
    return [c.detail for c in report.checks if c.detail]


def test_commutation_on_small_corpus():
    report = run({
        "experiment": "commutation",
        "seed": 2,
        "corpus": [{"name": "quartic", "builder": "polynomial", "params": {"coeffs": [1, -2, 0, 1, 0.5]}},
                   {"name": "lattice", "builder": "lattice_fractions", "params": {"K": 5}}],
        "params": {"samples": 20, "max_order": 2, "radius": 3.0},
    })
    assert report.passed, report.checks[0].measured
    assert len(report.tables[0].rows) == 4


def test_not_rational_chains():
    report = run({
        "experiment": "lem-notrational",
        "corpus": [{"name": "cubic_zeros", "builder": "order_third_product", "params": {"K": 20}},
                   {"name": "logsq", "builder": "log_squared_quotient", "params": {"K": 10}}],
    })
    assert names(report) == ["chain_cubic_zeros", "chain_logsq"]
    assert report.passed


def test_cartan_with_the_characteristic_term_in_use():
    report = run({
        "experiment": "lem-cartan",
        "corpus": [{"name": "f", "builder": "log_squared_quotient", "params": {"K": 10}},
                   {"name": "g", "expr": "(fp 1000 1000000)"}],
        "grid": {"min": 10, "max": 1e5, "points": 12},
        "params": {"logderiv_grid": {"min": 1, "max": 400, "points": 8}},
    })
    assert names(report) == ["epsilon_summable", "circle_avoidance", "pole_coincidence", "logderiv_bound"]
    assert not errors(report)
    bound = report.checks[-1]
    assert bound.passed, bound.measured
    assert bound.measured["positive"] == 8
    rows = next(t for t in report.tables if t.name == "logderiv").rows
    assert all(d > 0 for _, d, _ in rows)


def test_less_half_runs_on_a_small_product():
    report = run({"experiment": "thm-lesshalf", "corpus": [CUBIC], "params": {"checkpoints": [10, 100]}})
    assert names(report) == ["zero_counts_increase"]
    assert not errors(report)
    assert [row[0] for row in report.tables[0].rows] == pytest.approx([10, 100], rel=0.03)


def test_difference_or_divided_runs():
    report = run({
        "experiment": "thm-thm3",
        "corpus": [{"name": "f", "builder": "log_squared_quotient", "params": {"K": 10}}],
        "grid": {"min": 10, "max": 1e4, "points": 16},
        "params": {"checkpoints": [10, 100]},
    })
    assert names(report) == ["growth_hypothesis", "zero_counts_increase"]
    assert not errors(report)


def test_miles_rossi_runs():
    report = run({
        "experiment": "lem-miles-rossi",
        "corpus": [CUBIC],
        "grid": {"min": 2, "max": 1000, "points": 8},
        "params": {"samples": 2 ** 10},
    })
    assert names(report) == ["measure_bounded_below"]
    assert not errors(report)
    assert len(report.tables[0].rows) == 8


def test_arc_runs():
    report = run({
        "experiment": "lem-arc",
        "corpus": [{"name": "H", "builder": "order_third_product", "params": {"K": 40}}],
        "grid": {"min": 2, "max": 1e4, "points": 16},
        "params": {"samples": 2 ** 10, "refine": 4},
    })
    assert names(report) == ["arc_density"]
    assert not errors(report)
    assert report.checks[0].measured["resolution"] == pytest.approx(2 * math.pi / 2 ** 14)


def test_wiman_runs():
    report = run({
        "experiment": "wiman",
        "corpus": [CUBIC],
        "grid": {"min": 100, "max": 1e4, "points": 12},
        "params": {"orders": [1]},
    })
    assert names(report)[:2] == ["ratio_n1", "central_index_order"]
    assert not errors(report)


def test_small_runs_are_deterministic():
    cfg = {
        "experiment": "lem-notrational",
        "corpus": [{"name": "logsq", "builder": "log_squared_quotient", "params": {"K": 10}}],
    }
    assert run(cfg).canonical_json() == run(cfg).canonical_json()
    oracle = {
        "experiment": "commutation",
        "seed": 9,
        "corpus": [{"name": "lattice", "builder": "lattice_fractions", "params": {"K": 5}}],
        "params": {"samples": 10, "max_order": 1, "radius": 3.0},
    }
    assert run(oracle).canonical_json() == run(oracle).canonical_json()


@pytest.mark.slow
def test_asymptotics_on_a_reduced_grid():
    report = run({
        "experiment": "lem-asymptotics",
        "corpus": [CUBIC],
        "grid": {"min": 60, "max": 300, "points": 8},
        "params": {"c_count": 1, "zero_tol": 0.5, "order_grid": {"min": 10, "max": 1e4, "points": 16},
                   "relations": ["taylor2"]},
    })
    assert names(report) == ["first_difference", "second_difference", "taylor2"]
    assert not errors(report)
    assert report.metadata["order_estimate"] < 0.95
    assert {t.name for t in report.tables} == {"difference_n1", "difference_n2", "taylor2_n1"}


@pytest.mark.slow
def test_keldysh_and_growth_on_two_blocks():
    for eid in ("keldysh", "growth"):
        report = run({"experiment": eid, "grid": {"min": 5, "max": 200, "points": 12},
                      "params": {"n_seq": [2, 10]}})
        assert report.checks and not errors(report), eid


@pytest.mark.slow
def test_one_zero_with_three_blocks():
    report = run({"experiment": "thm-onezero", "params": {"n_seq": [2, 10, 60], "samples": 20}})
    assert report.status == Status.PASSED, [c.detail or c.measured for c in report.checks if not c.passed]
