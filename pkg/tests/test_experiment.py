import csv
import json

import pytest

import src.catalogue  # noqa: F401
from src.catalogue import list_experiments
from src.config import parse_config
from src.errors import ConfigError, UnknownReport
from src.experiment import ExperimentReport, emit_plotdata, load_report, run_experiment
from util.status import Status

WINDING = {
    "experiment": "argument-principle",
    "seed": 3,
    "params": {"count": 4, "point_radius": 4.0, "contour_radius": 5.0},
}

ORACLE = {
    "experiment": "diff-oracle",
    "seed": 1,
    "corpus": [{"name": "lattice", "builder": "lattice_fractions", "params": {"K": 5}}],
    "params": {"cases": 4, "max_order": 1, "radius": 3.0},
}


def test_catalogue():
    ids = [eid for eid, _, _ in list_experiments()]
    assert len(ids) == 14
    assert ids == sorted(ids)
    assert {"diff-oracle", "thm-onezero", "keldysh", "wiman", "lem-cartan"} <= set(ids)


def test_run_writes_report_and_tables(output_dir):
    report = run_experiment(parse_config(WINDING))
    assert report.status == Status.PASSED
    assert [c.name for c in report.checks] == ["winding_exact"]
    assert report.metadata["seed"] == 3
    assert report.provenance is not None and len(report.provenance.run_id) == 24

    path = output_dir / "argument-principle.json"
    saved = load_report(str(path))
    assert saved.canonical_json() == report.canonical_json()

    with open(output_dir / "argument-principle.winding.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["index", "expected", "circle", "square", "zero_count"]
    assert len(rows) == 1 + 4


def test_reruns_are_identical():
    cfg = parse_config(WINDING)
    a = run_experiment(cfg, write=False)
    b = run_experiment(cfg, write=False)
    assert a.canonical_json() == b.canonical_json()
    assert "provenance" not in json.loads(a.canonical_json())
    assert a.provenance.run_id != b.provenance.run_id


def test_unknown_experiment():
    with pytest.raises(ConfigError):
        run_experiment(parse_config({"experiment": "no-such-thing"}), write=False)


def test_bad_params():
    with pytest.raises(ConfigError):
        run_experiment(parse_config({**WINDING, "params": {"count": 4, "colour": "red"}}), write=False)
    with pytest.raises(ConfigError):
        run_experiment(parse_config({**WINDING, "params": {"count": "many"}}), write=False)


def test_unmet_tolerance_fails_the_run():
    cfg = parse_config({**ORACLE, "tolerances": {"relative": -1.0}})
    report = run_experiment(cfg, write=False)
    assert report.status == Status.FAILED
    assert not report.passed
    assert report.checks[0].name == "oracle_equivalence"


def test_oracle_passes_at_default_tolerance():
    report = run_experiment(parse_config(ORACLE), write=False)
    assert report.passed
    assert report.checks[0].measured["max_relative"] <= 1e-10


def test_load_report_errors(tmp_path):
    with pytest.raises(UnknownReport):
        load_report(str(tmp_path / "missing.json"))
    junk = tmp_path / "junk.json"
    junk.write_text("{\"experiment\": 1}")
    with pytest.raises(UnknownReport):
        load_report(str(junk))


def test_emit_plotdata(output_dir, tmp_path):
    run_experiment(parse_config(WINDING))
    paths = emit_plotdata(str(output_dir / "argument-principle.json"), str(tmp_path / "plots"))
    assert len(paths) == 1
    assert paths[0].endswith("argument-principle.winding.csv")
    with open(paths[0], newline="") as fh:
        assert next(csv.reader(fh))[0] == "index"


def test_report_model_roundtrip():
    report = run_experiment(parse_config(WINDING), write=False)
    again = ExperimentReport.model_validate_json(report.model_dump_json())
    assert again.canonical_json() == report.canonical_json()


@pytest.mark.slow
def test_one_zero_experiment(output_dir):
    cfg = parse_config({"experiment": "thm-onezero", "params": {"n_seq": [2, 10], "samples": 20}})
    report = run_experiment(cfg)
    assert report.passed, [c.detail or c.measured for c in report.checks if not c.passed]
    assert "thm-onezero.bundle.json" in report.artifacts
    assert (output_dir / "thm-onezero.bundle.json").exists()


def test_error_before_the_checks_fails_the_run(output_dir):
    cfg = parse_config({"experiment": "thm-lesshalf", "corpus": [{"name": "f", "expr": "(const 0)"}]})
    report = run_experiment(cfg)
    assert report.status == Status.FAILED
    assert [c.name for c in report.checks] == ["setup"]
    assert report.checks[0].detail.startswith("PreconditionViolation")
    assert load_report(str(output_dir / "thm-lesshalf.json")).status == Status.FAILED


def test_missing_corpus_entry_is_still_a_config_error():
    with pytest.raises(ConfigError):
        run_experiment(parse_config({"experiment": "thm-lesshalf"}), write=False)
