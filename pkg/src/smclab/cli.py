"""Command line interface: simulate, sweep, verify, gradcheck.

Exit codes: 0 on success (including runs whose analysis outcome is merely
"bound not satisfied" -- that is data, not failure), 1 when a simulation
errors out or a verification criterion fails, 2 on usage errors such as an
unknown suite name.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import load_config
from .errors import SlidingModeError
from .runner import run_scenario, sweep
from .scenarios import SCENARIO_NAMES
from .verification import SUITE_NAMES, format_results, gradient_check, run_suite


@click.group()
def main():
    """Sliding mode control synthesis, simulation, and verification."""


def _load(config_path: str):
    try:
        return load_config(config_path)
    except SlidingModeError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command(name="simulate")
@click.option("--config", "config_path", required=True,
              type=click.Path(dir_okay=False), help="JSON run configuration.")
@click.option("--out-dir", default=".", show_default=True,
              type=click.Path(file_okay=False), help="Output directory.")
@click.option("--plot", is_flag=True, default=False,
              help="Also render PNG figures next to the CSV/JSON output.")
def simulate_cmd(config_path, out_dir, plot):
    """Run one closed-loop simulation and write trajectory CSV + report JSON."""
    cfg = _load(config_path)
    try:
        result = run_scenario(cfg, out_dir, plot=plot)
    except SlidingModeError as exc:
        click.echo(f"simulation error: {exc}", err=True)
        click.echo(
            f"partial trajectory and report written under {out_dir}", err=True
        )
        sys.exit(1)
    reach = result.report["reach"]
    if reach and reach["t_reach_measured"] is not None:
        click.echo(
            f"reached |s| <= {reach['eps_band']:g} at t = "
            f"{reach['t_reach_measured']:.6g} "
            f"(predicted {reach['t_r_predicted']:.6g}, "
            f"bound_satisfied = {str(reach['bound_satisfied']).lower()})"
        )
    else:
        click.echo("band never persistently reached")
    chat = result.report["chatter"]
    if chat and "band_amplitude" in chat:
        click.echo(
            f"post-reach band amplitude {chat['band_amplitude']:.3g}, "
            f"{chat['switch_count']} sign switches"
        )
    click.echo(f"trajectory: {result.csv_path}")
    click.echo(f"report:     {result.json_path}")
    for p in result.figure_paths:
        click.echo(f"figure:     {p}")


@main.command(name="sweep")
@click.option("--config", "config_path", required=True,
              type=click.Path(dir_okay=False), help="JSON run configuration.")
@click.option("--param", required=True,
              help="Dotted path of the numeric field to sweep, e.g. controller.n")
@click.option("--values", required=True,
              help="Comma-separated list of values, e.g. 0.5,1,2,4")
@click.option("--out-dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--csv-name", default="sweep.csv", show_default=True)
def sweep_cmd(config_path, param, values, out_dir, csv_name):
    """Re-run one configuration across parameter values; write aggregated CSV."""
    cfg = _load(config_path)
    try:
        vals = [float(v) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise click.ClickException(f"--values must be comma-separated numbers: {exc}")
    try:
        path = sweep(cfg, param, vals, out_dir, csv_name)
    except SlidingModeError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"sweep of {param} over {len(vals)} values: {path}")


@main.command(name="verify")
@click.argument("suite", type=click.Choice(SUITE_NAMES))
@click.option("--verbose", is_flag=True, default=False,
              help="Show per-case details for passing criteria too.")
def verify_cmd(suite, verbose):
    """Run a verification suite and print the pass/fail table."""
    results = run_suite(suite)
    click.echo(format_results(results, verbose=verbose))
    if not all(r.passed for r in results):
        sys.exit(1)


@main.command(name="gradcheck")
@click.option("--scenario", required=True, type=click.Choice(SCENARIO_NAMES))
@click.option("--samples", default=1000, show_default=True)
@click.option("--seed", default=20260825, show_default=True)
def gradcheck_cmd(scenario, samples, seed):
    """Compare analytic surface gradients against central finite differences."""
    err = gradient_check(scenario, samples=samples, seed=seed)
    ok = err <= 1e-6
    click.echo(
        f"{scenario}: max relative gradient error {err:.3e} over "
        f"{samples} states -> {'PASS' if ok else 'FAIL'} (tolerance 1e-6)"
    )
    if not ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
