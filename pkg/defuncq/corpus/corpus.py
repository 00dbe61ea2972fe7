"""
Regression corpus: programs with golden outputs listed in corpus.yaml.

Each entry names a program file and the expected serialization of its value,
one item per list element. A program passes when the source engine produces
the golden value and every other engine configuration agrees with it.
"""
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import click
from ruamel.yaml import YAML
from tabulate import tabulate

from ..diff.diff import describe, find_mismatch, outcome
from ..pipeline import PipelineConfig, read_program
from ..utils.constants import (
    CORPUS_ENV_VAR,
    CORPUS_LOCATION,
    CORPUS_MANIFEST,
    EXIT_MISMATCH,
    SOURCE,
)
from ..utils.reporting import error, exit_codes, success

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    path: Path
    expected: tuple


def load_manifest(directory=CORPUS_LOCATION):
    directory = Path(directory)
    yaml = YAML(typ="safe")
    with open(directory / CORPUS_MANIFEST, encoding="utf-8") as f:
        manifest = yaml.load(f)
    return [
        CorpusEntry(
            name=entry["name"],
            path=directory / entry["file"],
            expected=tuple(str(line) for line in entry["expected"]),
        )
        for entry in manifest["programs"]
    ]


def check_entry(entry: CorpusEntry):
    """Returns a list of problems found with `entry`; empty when it passes."""
    program = read_program(entry.path)
    problems = []
    reference = outcome(program, PipelineConfig(engine=SOURCE))
    if reference.error:
        problems.append(f"{SOURCE} failed with {reference.error}")
    elif tuple(reference.text.splitlines()) != entry.expected:
        problems.append("golden value differs")
    mismatch = find_mismatch(program)
    if mismatch:
        problems.append(f"mismatch under {describe(mismatch.actual.config)}")
    return problems


@click.command()
@click.option(
    "-d",
    "--directory",
    envvar=CORPUS_ENV_VAR,
    default=CORPUS_LOCATION,
    show_default=True,
    help="Directory holding the corpus programs and corpus.yaml.",
)
@click.option(
    "-k",
    "--name",
    "names",
    multiple=True,
    help="Only check the named programs; may be repeated.",
)
def corpus(directory, names):
    """
    Checks the regression corpus against its golden values on every engine,
    representation and optimization level.

    E.g.:
    defuncq corpus -k pow -k group-by-eager
    """
    table = []
    failed = 0
    with exit_codes():
        for entry in load_manifest(directory):
            if names and entry.name not in names:
                continue
            problems = check_entry(entry)
            failed += bool(problems)
            status = "; ".join(problems) if problems else "ok"
            table.append([entry.name, status])

    click.echo(tabulate(table, ["program", "status"], tablefmt="simple"))
    if failed:
        error(f"{failed} of {len(table)} corpus programs failed.")
        sys.exit(EXIT_MISMATCH)
    success(f"All {len(table)} corpus programs passed.")
