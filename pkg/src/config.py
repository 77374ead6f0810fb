"""
Experiment configuration: one YAML file per run.

    experiment: keldysh
    corpus:
      - {name: f, builder: counterexample_f, params: {n_seq: [2, 10, 60]}}
    grid: {min: 5, max: 1000, points: 30, geometric: true}
    tolerances: {final: 0.5}
    precision_bits: 256
    seed: 7
    output: {dir: out}
    params: {}

Unknown keys at any level are rejected. `params` is validated again by the
experiment's own model.
"""
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.corpus import CorpusEntry
from src.errors import ConfigError
from src.expr import FunctionExpr
from src.grid import GridSpec
from util.settings import load_settings


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dir: str = "out"
    # report file name inside dir, default <experiment>.json
    report: Optional[str] = None


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    experiment: str
    corpus: List[CorpusEntry] = Field(default_factory=list)
    grid: Optional[GridSpec] = None
    tolerances: Dict[str, float] = Field(default_factory=dict)
    # mantissa of the extended path; the double path is always 53-bit
    precision_bits: int = Field(256, ge=53)
    seed: int = 0
    output: OutputConfig = Field(default_factory=OutputConfig)
    params: Dict[str, Any] = Field(default_factory=dict)

    def output_dir(self) -> str:
        return load_settings().output_dir or self.output.dir

    def report_name(self) -> str:
        return self.output.report or f"{self.experiment}.json"

    def function(self, name: str) -> FunctionExpr:
        for entry in self.corpus:
            if entry.name == name:
                return entry.build()
        raise ConfigError(f"{self.experiment}: corpus has no entry {name!r}")

    def functions(self) -> Dict[str, FunctionExpr]:
        return {entry.name: entry.build() for entry in self.corpus}

    def tolerance(self, key: str, default: float) -> float:
        return self.tolerances.get(key, default)


def parse_config(data: Any, source: str = "<config>") -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{source}: {e}") from e


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}") from e
    return parse_config(data, path)
