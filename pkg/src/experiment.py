import csv
import json
import os
from abc import ABC, abstractmethod
from time import time_ns
from typing import Any, Callable, ClassVar, Dict, List, Optional, Sequence, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.check import Check, CheckKind, Outcome, failed_check, run_check
from src.config import ExperimentConfig
from src.errors import ConfigError, UnknownReport, ZeroDiffError
from util.log import Log
from util.status import Status
from util.versionstamp import versionid, versionstamp

vm = versionstamp()


class NoParams(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Table(BaseModel):
    """Plot data: one CSV with a header row."""
    name: str
    columns: List[str]
    rows: List[List[Any]]


class Provenance(BaseModel):
    run_id: versionid
    started_at: int
    elapsed_us: int
    config_path: Optional[str] = None


class ExperimentReport(BaseModel):
    experiment: str
    status: Status
    checks: List[Check]
    tables: List[Table] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)
    artifacts: List[str] = Field(default_factory=list)
    # run identity and wall clock; never compared between runs
    provenance: Optional[Provenance] = None

    @property
    def passed(self) -> bool:
        return self.status == Status.PASSED

    def canonical_json(self) -> str:
        return self.model_dump_json(exclude={"provenance"}, indent=2)


class Experiment(ABC):
    """
    One catalogued experiment. Subclasses declare an id, a one-line description,
    the result they exercise, and a params model; `run` records checks and
    tables through `check` and `table`.
    """
    id: ClassVar[str]
    description: ClassVar[str]
    anchor: ClassVar[str]
    Params: ClassVar[Type[BaseModel]] = NoParams

    def __init__(self, cfg: ExperimentConfig, log: Optional[Log] = None):
        self.cfg = cfg
        try:
            self.params = self.Params.model_validate(cfg.params)
        except ValidationError as e:
            raise ConfigError(f"{cfg.experiment}: params: {e}") from e
        self.log = (log or Log("experiment")).with_context(experiment=self.id, seed=cfg.seed)
        self.checks: List[Check] = []
        self.tables: List[Table] = []
        self.artifacts: List[str] = []
        self.metadata: Dict[str, Any] = {
            "precision_bits": cfg.precision_bits,
            "seed": cfg.seed,
            "grid": cfg.grid.model_dump() if cfg.grid else None,
            "tolerances": dict(cfg.tolerances),
            "params": self.params.model_dump(),
        }

    @abstractmethod
    def run(self):
        pass

    def check(self, name: str, description: str, kind: CheckKind, fn: Callable[[], Outcome]) -> Check:
        c = run_check(name, description, kind, fn, self.log, tags=[self.id])
        self.checks.append(c)
        return c

    def table(self, name: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]):
        self.tables.append(Table(name=name, columns=list(columns), rows=[list(r) for r in rows]))

    def artifact(self, name: str) -> str:
        """Path for an extra output file next to the report."""
        out = self.cfg.output_dir()
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, name)
        self.artifacts.append(name)
        return path

    def radii(self) -> List[float]:
        if self.cfg.grid is None:
            raise ConfigError(f"{self.id} needs a grid")
        return [float(r) for r in self.cfg.grid.radii()]


REGISTRY: Dict[str, Type[Experiment]] = {}


def register(cls: Type[Experiment]) -> Type[Experiment]:
    REGISTRY[cls.id] = cls
    return cls


def run_experiment(cfg: ExperimentConfig, log: Optional[Log] = None, config_path: Optional[str] = None,
                   write: bool = True) -> ExperimentReport:
    cls = REGISTRY.get(cfg.experiment)
    if cls is None:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}; known: {sorted(REGISTRY)}")
    run_id = vm()
    started = time_ns() // 1_000
    exp = cls(cfg, log)
    exp.log.info("experiment started", run_id=run_id)
    with exp.log.trace("run_experiment", run_id=run_id):
        try:
            exp.run()
        except ConfigError:
            raise
        except ZeroDiffError as e:
            exp.checks.append(failed_check("setup", "inputs prepared outside the checks", e, exp.log))
    failed = [c.name for c in exp.checks if not c.passed]
    status = Status.PASSED if exp.checks and not failed else Status.FAILED
    report = ExperimentReport(
        experiment=cfg.experiment,
        status=status,
        checks=exp.checks,
        tables=exp.tables,
        metadata=exp.metadata,
        artifacts=exp.artifacts,
        provenance=Provenance(run_id=run_id, started_at=started, elapsed_us=time_ns() // 1_000 - started,
                              config_path=config_path),
    )
    exp.log.info("experiment finished", status=status.value, failed=failed)
    if write:
        write_report(report, os.path.join(cfg.output_dir(), cfg.report_name()))
    return report


def write_report(report: ExperimentReport, path: str):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.model_dump_json(indent=2))
        fh.write("\n")
    for t in report.tables:
        _write_table(t, os.path.dirname(path) or ".", report.experiment)


def load_report(path: str) -> ExperimentReport:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return ExperimentReport.model_validate(json.load(fh))
    except (OSError, ValueError) as e:
        raise UnknownReport(f"{path}: {e}") from e


def _write_table(t: Table, directory: str, prefix: str) -> str:
    path = os.path.join(directory, f"{prefix}.{t.name}.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(t.columns)
        for row in t.rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return path


def emit_plotdata(report_path: str, directory: Optional[str] = None) -> List[str]:
    """Write every table of a saved report as CSV; returns the paths written."""
    report = load_report(report_path)
    out = directory or os.path.dirname(report_path) or "."
    os.makedirs(out, exist_ok=True)
    return [_write_table(t, out, report.experiment) for t in report.tables]
