"""Check command: run the oracle suites."""

from typing import Optional

import typer

from littlebird.checks import run_checks
from littlebird.cli.errors import reported_errors
from littlebird.cli.options import parse_name_list, resolve_seed
from littlebird.config import Settings
from littlebird.exceptions import CheckFailedError

app = typer.Typer(help="Run oracle suites.")


@app.callback(invoke_without_command=True)
def check(
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Seed for random probes", min=0),
    suites: Optional[str] = typer.Option(
        None,
        "--suites",
        help="Comma-separated subset of blocked_equivalence,gradients,pi_equivalence,complexity,span_finder",
    ),
) -> None:
    """
    Run every oracle suite and print one line each; exits 2 if any fails.

    Examples:
        littlebird check
        littlebird check --suites span_finder,pi_equivalence
    """
    settings = Settings()
    with reported_errors():
        results = run_checks(resolve_seed(seed, settings), parse_name_list(suites))
        for result in results:
            typer.echo(result.line())
        failed = [r.name for r in results if not r.passed]
        if failed:
            raise CheckFailedError(f"Failed suites: {', '.join(failed)}", failed=failed)
