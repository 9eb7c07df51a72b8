"""Command-line interface for stein_poisson.

Registered as the ``stein-poisson`` console script via ``[project.scripts]``
in ``pyproject.toml``:

.. code-block:: toml

    [project.scripts]
    stein-poisson = "stein_poisson.cli:main"

Subcommands:

* ``verify`` runs the self-check suites and exits 1 when a check fails.
* ``experiment`` runs a named experiment from a JSON config and writes a CSV
  table plus a JSON sidecar.
* ``trace`` simulates one immigration-death path and writes it as CSV.

Configuration problems exit with status 2.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import cast

import click
from rich.console import Console
from rich.table import Table

from .carrier import Configuration, FiniteAtoms
from .config import MODES, load_experiment_config
from .errors import ConfigurationError, DomainError
from .experiments import run_experiment, write_experiment
from .imdeath import DiscreteIntensity, simulate_spatial_imdeath
from .io import trajectory_rows, write_trajectory_csv
from .logging import (
    LogLevel,
    RunContextFilter,
    install_run_context,
    remove_run_context,
    setup_logging,
)
from .verify import run_suite, suite_names

EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2


class ConfigError(click.ClickException):
    """A configuration problem; exits with status 2."""

    exit_code = EXIT_CONFIG_ERROR


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="stein-poisson")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    default=None,
    help="Console and file log level (default WARNING, DEBUG if $DEBUG is set).",
)
@click.option(
    "--log-file",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Also write structured JSON log lines to this file.",
)
def main(log_level: str | None, log_file: Path | None) -> None:
    """Stein's method for Poisson and Poisson process approximation."""
    level = cast(LogLevel, log_level.upper()) if log_level else None
    setup_logging(level, log_file)


@main.command()
@click.option(
    "--suite",
    "-s",
    type=click.Choice(suite_names()),
    default="all",
    show_default=True,
    help="Which self-check suite to run.",
)
@click.option(
    "--seed", type=int, default=0, show_default=True, help="Master seed of the Monte Carlo checks."
)
@click.option("--full", is_flag=True, help="Use acceptance-scale sample sizes (slow).")
@click.option(
    "--json",
    "json_path",
    type=click.Path(dir_okay=False, allow_dash=True, path_type=Path),
    default=None,
    help="Write the machine-readable report here ('-' for stdout).",
)
def verify(suite: str, seed: int, full: bool, json_path: Path | None) -> None:
    """Run self-check suites against exact oracles."""
    reports = run_suite(suite, seed=seed, full=full)
    document = {"passed": all(r.passed for r in reports), "suites": [r.to_dict() for r in reports]}
    if json_path is not None and str(json_path) == "-":
        click.echo(json.dumps(document, indent=2, sort_keys=True))
    else:
        table = Table(title=f"verify {suite}")
        table.add_column("suite")
        table.add_column("check")
        table.add_column("result")
        table.add_column("detail")
        for report in reports:
            for check in report.checks:
                table.add_row(
                    report.suite,
                    check.name,
                    "[green]pass[/green]" if check.passed else "[red]FAIL[/red]",
                    check.detail,
                )
        Console().print(table)
        if json_path is not None:
            text = json.dumps(document, indent=2, sort_keys=True) + "\n"
            json_path.write_text(text, encoding="utf-8")
    if not document["passed"]:
        raise SystemExit(EXIT_CHECK_FAILED)


@main.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=False, dir_okay=False, path_type=Path),
    help="JSON experiment configuration.",
)
@click.option("--seed", type=int, default=None, help="Master seed (overrides monte_carlo.seed).")
@click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Output directory (overrides output.directory).",
)
@click.option(
    "--mode", type=click.Choice(MODES), default=None, help="exact or mc (overrides mode)."
)
@click.option("--reps", type=int, default=None, help="Replications (overrides monte_carlo.reps).")
def experiment(
    config_path: Path, seed: int | None, out: Path | None, mode: str | None, reps: int | None
) -> None:
    """Run the experiment described by a JSON config."""
    try:
        config = load_experiment_config(config_path, seed=seed, out=out, mode=mode, reps=reps)
    except ConfigurationError as exc:
        raise ConfigError(str(exc)) from exc

    context = RunContextFilter(config.name, config.config_hash(), config.monte_carlo.seed)
    install_run_context(context)
    try:
        result = run_experiment(config)
        table_path, sidecar_path = write_experiment(config, result)
    except ConfigurationError as exc:
        raise ConfigError(str(exc)) from exc
    finally:
        remove_run_context(context)

    summary = Table(title=config.name)
    summary.add_column("output")
    summary.add_column("path")
    summary.add_row("table", str(table_path))
    summary.add_row("metadata", str(sidecar_path))
    summary.add_row("rows", str(len(result.rows)))
    summary.add_row("config hash", config.config_hash()[:16])
    Console().print(summary)


def _parse_initial(value: str, atoms: int) -> Configuration:
    if not value:
        return Configuration()
    try:
        points = tuple(int(v) for v in value.split(","))
    except ValueError as exc:
        raise click.BadParameter("expected comma-separated atom indices") from exc
    if any(not 0 <= a < atoms for a in points):
        raise click.BadParameter(f"atom indices must lie in 0..{atoms - 1}")
    return Configuration(points)


@main.command()
@click.option(
    "--atoms",
    type=click.IntRange(min=1),
    default=3,
    show_default=True,
    help="Atoms of the carrier.",
)
@click.option(
    "--lam", type=float, default=2.0, show_default=True, help="Total immigration rate λ."
)
@click.option(
    "--horizon", type=float, default=5.0, show_default=True, help="Simulate on [0, horizon]."
)
@click.option("--initial", default="", help="Initial configuration as comma-separated atoms.")
@click.option("--seed", type=int, required=True, help="Master seed.")
@click.option(
    "--out",
    type=click.Path(dir_okay=False, allow_dash=True, path_type=Path),
    default=Path("-"),
    show_default=True,
    help="CSV destination ('-' for stdout).",
)
def trace(atoms: int, lam: float, horizon: float, initial: str, seed: int, out: Path) -> None:
    """Simulate an immigration-death path with uniform immigration."""
    carrier = FiniteAtoms.discrete(atoms)
    try:
        intensity = DiscreteIntensity.on_atoms(carrier, [lam / atoms] * atoms)
        path = simulate_spatial_imdeath(_parse_initial(initial, atoms), intensity, horizon, seed)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    header = {"seed": seed, "lam": lam, "atoms": atoms, "horizon": horizon}
    if str(out) == "-":
        rows = [f"# {key}={value}" for key, value in header.items()]
        rows.append("time,event,location")
        rows.extend(",".join(row) for row in trajectory_rows(path, carrier))
        click.echo("\n".join(rows))
    else:
        write_trajectory_csv(path, out, header, carrier)
        click.echo(f"wrote {len(path.events)} events to {out}", err=True)

