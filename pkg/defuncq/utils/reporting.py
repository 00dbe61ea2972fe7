import contextlib
import sys

import click

from .constants import (
    EXIT_INPUT_ERROR,
    EXIT_IO_ERROR,
    EXIT_MISMATCH,
    EXIT_RUNTIME_ERROR,
)
from .errors import (
    EvaluationError,
    NotApplicable,
    ParseError,
    RewriteError,
    ValidationError,
)


def error(message):
    click.echo(click.style(message, fg="red", bold=True), err=True)


def success(message):
    click.echo(click.style(message, fg="green", bold=True))


def exit_code_for(exc):
    if isinstance(exc, (ParseError, ValidationError, NotApplicable, UnicodeError)):
        return EXIT_INPUT_ERROR
    if isinstance(exc, OSError):
        return EXIT_IO_ERROR
    if isinstance(exc, (EvaluationError, RewriteError)):
        return EXIT_RUNTIME_ERROR
    return EXIT_MISMATCH


@contextlib.contextmanager
def exit_codes():
    """Prints a failed command's diagnostics to stderr and exits with its code."""
    try:
        yield
    except (
        ParseError,
        ValidationError,
        NotApplicable,
        EvaluationError,
        RewriteError,
        UnicodeError,
        OSError,
    ) as e:
        if isinstance(e, ValidationError):
            for diagnostic in e.diagnostics:
                error(str(diagnostic))
        elif isinstance(e, OSError):
            error(f"{e.filename or ''}: {e.strerror or e}")
        elif isinstance(e, UnicodeError):
            error(f"input is not valid UTF-8: {e}")
        else:
            error(str(e))
        sys.exit(exit_code_for(e))
