import json
from pathlib import Path

import click

from ..engine.values import serialize
from ..pipeline import PipelineConfig, read_program, run_program
from ..utils.constants import (
    DEFAULT_ENGINE,
    DEFAULT_OPT,
    DEFAULT_REPR,
    ENGINES,
    OPT_LEVELS,
    REPRESENTATIONS,
)
from ..utils.reporting import exit_codes


def _write_stats(stats, path):
    record = json.dumps(stats.as_dict(), indent=4)
    if path == "-":
        click.echo(record, err=True)
    else:
        Path(path).write_text(record + "\n", encoding="utf-8")


@click.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@click.option(
    "--engine",
    type=click.Choice(ENGINES),
    default=DEFAULT_ENGINE,
    show_default=True,
    help="Engine to evaluate the program on.",
)
@click.option(
    "--repr",
    "representation",
    type=click.Choice(REPRESENTATIONS),
    default=DEFAULT_REPR,
    show_default=True,
    help="Closure representation used by the lowered engine.",
)
@click.option(
    "--opt",
    type=click.IntRange(min(OPT_LEVELS), max(OPT_LEVELS)),
    default=DEFAULT_OPT,
    show_default=True,
    help="Optimization level.",
)
@click.option(
    "--share-env",
    type=click.Choice(["on", "off"]),
    default="off",
    show_default=True,
    help="Intern closure environments so equal environments share storage.",
)
@click.option(
    "--stats",
    "stats_out",
    default=None,
    help="File to write run statistics to as JSON; '-' for standard error.",
)
def run(input_path, engine, representation, opt, share_env, stats_out):
    """
    Evaluates a program and prints its value, one item per line.

    E.g.:
    defuncq run group-by-lazy.fq --engine lowered --stats stats.json
    """
    config = PipelineConfig(
        engine=engine,
        repr=representation,
        opt=opt,
        share_env=share_env == "on",
        stats_out=stats_out,
    )
    with exit_codes():
        value, stats = run_program(read_program(input_path), config)
        if config.stats_out:
            _write_stats(stats, config.stats_out)
    click.echo(serialize(value))
