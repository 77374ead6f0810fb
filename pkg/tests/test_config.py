from pathlib import Path

import pytest

import src.catalogue  # noqa: F401
from src.config import load_config, parse_config
from src.errors import ConfigError
from src.experiment import REGISTRY

CONFIGS = sorted((Path(__file__).resolve().parent.parent / "configs").glob("*.yaml"))

MINIMAL = {
    "experiment": "argument-principle",
    "params": {"count": 3},
}


def test_minimal_config():
    cfg = parse_config(MINIMAL)
    assert cfg.precision_bits == 256
    assert cfg.seed == 0
    assert cfg.report_name() == "argument-principle.json"
    assert cfg.tolerance("relative", 1e-10) == 1e-10


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigError):
        parse_config({**MINIMAL, "colour": "blue"})
    with pytest.raises(ConfigError):
        parse_config({**MINIMAL, "output": {"dir": "x", "format": "csv"}})
    with pytest.raises(ConfigError):
        parse_config({**MINIMAL, "grid": {"min": 1, "max": 10, "points": 4, "base": 2}})


def test_precision_floor():
    with pytest.raises(ConfigError):
        parse_config({**MINIMAL, "precision_bits": 32})


def test_top_level_must_be_a_mapping():
    with pytest.raises(ConfigError):
        parse_config([1, 2, 3])


def test_output_dir_override(monkeypatch, output_dir):
    cfg = parse_config({**MINIMAL, "output": {"dir": "elsewhere"}})
    assert cfg.output_dir() == str(output_dir)
    monkeypatch.delenv("ZERODIFF_OUTPUT_DIR")
    assert cfg.output_dir() == "elsewhere"


def test_missing_corpus_entry():
    cfg = parse_config({**MINIMAL, "corpus": [{"name": "p", "builder": "polynomial"}]})
    assert set(cfg.functions()) == {"p"}
    with pytest.raises(ConfigError):
        cfg.function("f")


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.yaml"))
    bad = tmp_path / "bad.yaml"
    bad.write_text("experiment: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(str(bad))


def test_shipped_configs_are_valid():
    assert len(CONFIGS) == 14
    for path in CONFIGS:
        cfg = load_config(str(path))
        assert cfg.experiment in REGISTRY, path.name
        # params validate against the experiment's own model
        REGISTRY[cfg.experiment](cfg)
