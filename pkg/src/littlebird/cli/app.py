"""Typer application wiring the check, train, bench and dump command groups."""

from typing import Optional

import typer
from pydantic import ValidationError

from littlebird import __version__
from littlebird.cli.commands import bench, check, dump, train
from littlebird.cli.errors import reported_errors
from littlebird.config import Settings
from littlebird.exceptions import ConfigurationError
from littlebird.logging import configure_logging

app = typer.Typer(
    name="littlebird",
    help="LittleBird long-sequence attention: checks, training, benchmarks and heatmaps.",
    add_completion=True,
    no_args_is_help=True,
)

app.add_typer(check.app, name="check")
app.add_typer(train.app, name="train")
app.add_typer(bench.app, name="bench")
app.add_typer(dump.app, name="dump")


def _print_version(value: bool) -> None:
    if value:
        typer.echo(f"littlebird version {__version__}")
        raise typer.Exit()


def _load_settings() -> Settings:
    try:
        settings = Settings()
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigurationError(f"Invalid LITTLEBIRD_* setting: {first['msg']}") from exc
    if settings.float_bits not in (32, 64):
        raise ConfigurationError(
            f"LITTLEBIRD_FLOAT_BITS must be 32 or 64, got {settings.float_bits}"
        )
    return settings


@app.callback()
def main(
    version: Optional[bool] = typer.Option(
        None,
        "--version",
        "-v",
        callback=_print_version,
        is_eager=True,
        help="Show version and exit.",
    ),
    verbose: bool = typer.Option(False, "--verbose", "-V", help="Debug-level console logging."),
    log_format: Optional[str] = typer.Option(
        None, "--log-format", help="json or console (default: LITTLEBIRD_LOG_FORMAT)."
    ),
) -> None:
    """LittleBird - BiALiBi, pack & unpack and sliding-window attention on numpy."""
    with reported_errors():
        settings = _load_settings()
        chosen = log_format or ("console" if verbose else settings.log_format)
        if chosen not in ("json", "console"):
            raise ConfigurationError(f"--log-format must be json or console, got {chosen!r}")
    configure_logging(
        log_level="DEBUG" if verbose else settings.log_level,
        log_format=chosen,
    )


if __name__ == "__main__":
    app()
