from typing import List

import typer
from rich.console import Console
from rich.table import Table

import src.catalogue  # noqa: F401  (registers the experiments)
from src.catalogue import list_experiments
from src.config import load_config
from src.errors import ConfigError, UnknownReport
from src.experiment import ExperimentReport, emit_plotdata, run_experiment
from util.log import Log
from util.pool import parallel_map

app = typer.Typer(help="Desk-scale experiments on differences of meromorphic functions.", no_args_is_help=True)
console = Console()
base_log = Log("cli")


def _run_one(path: str) -> ExperimentReport:
    cfg = load_config(path)
    return run_experiment(cfg, base_log.with_context(config=path), config_path=path)


@app.command()
def run(configs: List[str] = typer.Argument(..., help="Experiment config files (YAML)"),
        parallel: bool = typer.Option(False, "--parallel", help="Run independent experiments concurrently")):
    """Run experiments; exits non-zero if any check fails."""
    try:
        reports = parallel_map(_run_one, configs, threads=len(configs) if parallel else 1)
    except ConfigError as e:
        console.print(f"[red]config error:[/red] {e}")
        raise typer.Exit(2)
    failed = False
    for path, report in zip(configs, reports):
        colour = "green" if report.passed else "red"
        console.print(f"[{colour}]{report.status.value}[/{colour}] {report.experiment} ({path})")
        for c in report.checks:
            if not c.passed:
                console.print(f"  - {c.name}: {c.detail or c.measured}")
        failed |= not report.passed
    raise typer.Exit(1 if failed else 0)


@app.command("list")
def list_cmd():
    """Show the experiment catalogue."""
    table = Table(title="experiments")
    table.add_column("id", style="bold")
    table.add_column("description")
    table.add_column("exercises")
    for eid, description, anchor in list_experiments():
        table.add_row(eid, description, anchor)
    console.print(table)


@app.command()
def plotdata(report: str = typer.Argument(..., help="Report JSON written by `run`")):
    """Write the plot tables of a report as CSV files next to it."""
    try:
        paths = emit_plotdata(report)
    except UnknownReport as e:
        console.print(f"[red]unknown report:[/red] {e}")
        raise typer.Exit(2)
    for p in paths:
        console.print(p)


if __name__ == "__main__":
    app()
