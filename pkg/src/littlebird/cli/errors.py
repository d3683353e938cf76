"""One-line, machine-parsable error reporting for CLI commands."""

from collections.abc import Iterator
from contextlib import contextmanager

import typer

from littlebird.exceptions import CheckFailedError, LittleBirdError
from littlebird.logging import get_logger

logger = get_logger(__name__)

EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2


def error_line(exc: LittleBirdError) -> str:
    """`error code=<CODE> message="<text>"` with quotes escaped and newlines folded."""
    message = " ".join(exc.message.split()).replace("\\", "\\\\").replace('"', '\\"')
    return f'error code={exc.code} message="{message}"'


@contextmanager
def reported_errors() -> Iterator[None]:
    """Turn a LittleBirdError into an error line on stderr and a nonzero exit."""
    try:
        yield
    except LittleBirdError as exc:
        logger.debug("command_failed", code=exc.code, **{k: str(v) for k, v in exc.context.items()})
        typer.echo(error_line(exc), err=True)
        status = EXIT_CHECK_FAILED if isinstance(exc, CheckFailedError) else EXIT_ERROR
        raise typer.Exit(status) from exc
