import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
from tabulate import tabulate

from ..diff.diff import describe, find_mismatch
from ..syntax.printer import print_program
from ..utils.constants import (
    DEFAULT_FUZZ_COUNT,
    DEFAULT_MAX_DEPTH,
    DEFAULT_SEED,
    EXIT_MISMATCH,
    SOURCE_SUFFIX,
)
from ..utils.reporting import error, success
from .generator import GenConfig, gen_program

logger = logging.getLogger(__name__)


def check_seed(config: GenConfig):
    """Returns (seed, program text, failing configuration or None)."""
    program = gen_program(config)
    mismatch = find_mismatch(program)
    failing = describe(mismatch.actual.config) if mismatch else None
    return config.seed, print_program(program), failing


def run_seeds(configs, jobs=1):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            yield from executor.map(check_seed, configs, chunksize=8)
    else:
        yield from map(check_seed, configs)


@click.command()
@click.option(
    "-n",
    "--count",
    type=click.IntRange(min=0),
    default=DEFAULT_FUZZ_COUNT,
    show_default=True,
    help="Number of programs to generate.",
)
@click.option(
    "--seed",
    type=int,
    default=DEFAULT_SEED,
    show_default=True,
    help="Seed of the first program; program i uses seed + i.",
)
@click.option(
    "--max-depth",
    type=click.IntRange(min=1),
    default=DEFAULT_MAX_DEPTH,
    show_default=True,
    help="Maximum expression depth of generated programs.",
)
@click.option(
    "-j",
    "--jobs",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Number of worker processes.",
)
@click.option(
    "--save-dir",
    default=None,
    help="Directory to write mismatching programs to.",
)
def fuzz(count, seed, max_depth, jobs, save_dir):
    """
    Generates random programs and checks that all engines agree on them.

    E.g.:
    defuncq fuzz --count 500 --seed 1 --jobs 4 --save-dir failures
    """
    configs = [GenConfig(seed=seed + i, max_depth=max_depth) for i in range(count)]
    failures = []
    for program_seed, text, failing in run_seeds(configs, jobs):
        if failing is None:
            continue
        logger.warning("seed %d fails under %s", program_seed, failing)
        failures.append([program_seed, failing])
        if save_dir:
            directory = Path(save_dir)
            directory.mkdir(parents=True, exist_ok=True)
            path = directory / f"seed-{program_seed}{SOURCE_SUFFIX}"
            path.write_text(text, encoding="utf-8")

    if failures:
        click.echo(tabulate(failures, ["seed", "configuration"], tablefmt="simple"))
        error(f"{len(failures)} of {count} programs disagree.")
        sys.exit(EXIT_MISMATCH)
    success(f"All {count} programs agree.")
