"""Command-line front end: ``metalgeom verify | demo | family | list-checks``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for usage
or input errors.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .demos import BUILTINS, builtin
from .errors import MetalgeomError
from .families import Family2DSpec, Variant, family_2d
from .metallic import MetallicParams, metallic_residual
from .scenario import CHECKS, Report, load_scenario, run

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _fail_input(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_INPUT)


def _emit(report: Report, fmt: str, output: Path | None) -> None:
    text = report.to_json() if fmt == "structured" else report.to_text()
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8")
        click.echo(f"report written to {output}", err=True)


def _run(data, allow_real: bool, tol, samples, seed, fmt: str, output) -> None:
    try:
        sc = load_scenario(data, allow_real=allow_real).with_overrides(tol, samples, seed)
        report = run(sc)
    except (MetalgeomError, ValueError) as exc:
        _fail_input(str(exc))
    _emit(report, fmt, output)
    sys.exit(report.exit_code)


_report_option = click.option(
    "--report",
    "fmt",
    type=click.Choice(["text", "structured"]),
    default="text",
    show_default=True,
    help="Human-readable lines or canonical JSON.",
)
_output_option = click.option(
    "--output", "-o", type=click.Path(dir_okay=False, path_type=Path), help="Write the report to a file."
)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="metalgeom")
def main() -> None:
    """Verify metallic structures J^2 = aJ + bI and their connections at sample points."""


@main.command()
@click.argument("scenario_file", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--tol", type=float, help="Tolerance for every check (replaces per-check overrides).")
@click.option("--samples", type=int, help="Number of sample points.")
@click.option("--seed", type=int, help="Seed for the point sampler.")
@_report_option
@_output_option
@click.option("--allow-real-params", is_flag=True, help="Accept non-integer a, b (exploration only).")
def verify(scenario_file, tol, samples, seed, fmt, output, allow_real_params):
    """Run the checks of a JSON scenario file."""
    _run(scenario_file, allow_real_params, tol, samples, seed, fmt, output)


@main.command()
@click.argument("name", type=click.Choice(list(BUILTINS)))
@click.option("--a", "a", type=int, help="Override the parameter a.")
@click.option("--b", "b", type=int, help="Override the parameter b.")
@click.option("--tol", type=float, help="Tolerance for every check.")
@click.option("--samples", type=int, help="Number of sample points.")
@click.option("--seed", type=int, help="Seed for the point sampler.")
@_report_option
@_output_option
def demo(name, a, b, tol, samples, seed, fmt, output):
    """Run a built-in scenario."""
    _run(builtin(name, a, b), False, tol, samples, seed, fmt, output)


@main.command()
@click.option("--a", "a", type=float, required=True)
@click.option("--b", "b", type=float, required=True)
@click.option("--r", "r", type=float, default=0.0, show_default=True)
@click.option("--s", "s", type=float, default=1.0, show_default=True)
@click.option("--t", "t", type=float, default=0.0, show_default=True, help="Diagonal entry for generic-s-t.")
@click.option(
    "--variant",
    type=click.Choice([v.value for v in Variant]),
    default=Variant.GENERIC_RS.value,
    show_default=True,
)
@click.option("--allow-real-params", is_flag=True, help="Accept non-integer a, b.")
def family(a, b, r, s, t, variant, allow_real_params):
    """Print a 2x2 metallic matrix of the two-parameter family and its residual."""
    try:
        params = MetallicParams(a, b, allow_real=allow_real_params)
        M = family_2d(Family2DSpec(params, r=r, s=s, variant=Variant(variant), t=t))
    except ValueError as exc:
        _fail_input(str(exc))
    res = metallic_residual(M, params.a, params.b)
    click.echo(f"a={params.a:g} b={params.b:g} rho={params.rho:.17g} variant={variant}")
    for row in M:
        click.echo("  [" + ", ".join(f"{v: .17g}" for v in row) + "]")
    click.echo(f"residual |J^2 - aJ - bI| = {res:.3e}")
    sys.exit(EXIT_PASS if res <= 1e-12 * max(1.0, float(np.abs(M).max()) ** 2) else EXIT_FAIL)


@main.command("list-checks")
def list_checks():
    """Print the check names a scenario may request."""
    width = max(len(n) for n in CHECKS)
    for name, spec in CHECKS.items():
        click.echo(f"{name:<{width}}  {spec.description}")


if __name__ == "__main__":  # pragma: no cover
    main()
