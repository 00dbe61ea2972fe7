from pathlib import Path

import click

from ..pipeline import PipelineConfig, compile_program, read_program
from ..syntax.printer import print_program
from ..utils.constants import (
    DEFAULT_OPT,
    DEFAULT_REPR,
    ENGINES,
    LOWERED,
    OPT_LEVELS,
    REPRESENTATIONS,
)
from ..utils.reporting import exit_codes


@click.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@click.option(
    "-o",
    "--output",
    default=None,
    help="File to write the compiled program to. Standard output by default.",
)
@click.option(
    "--engine",
    type=click.Choice(ENGINES),
    default=LOWERED,
    show_default=True,
    help="Engine the compiled program is meant for.",
)
@click.option(
    "--repr",
    "representation",
    type=click.Choice(REPRESENTATIONS),
    default=DEFAULT_REPR,
    show_default=True,
    help="Closure representation used when lowering.",
)
@click.option(
    "--opt",
    type=click.IntRange(min(OPT_LEVELS), max(OPT_LEVELS)),
    default=DEFAULT_OPT,
    show_default=True,
    help="Optimization level.",
)
def compile(input_path, output, engine, representation, opt):
    """
    Compiles a higher-order program and prints the result.

    The program is defunctionalized, optimized and, for the lowered engine,
    lowered to a first-order closure representation. Programs without function
    items are printed unchanged at every optimization level.

    E.g.:
    defuncq compile map.fq --repr node --opt 0 -o map-lowered.fq
    """
    config = PipelineConfig(engine=engine, repr=representation, opt=opt)
    with exit_codes():
        program = compile_program(read_program(input_path), config)
        text = print_program(program)
        if output:
            Path(output).write_text(text, encoding="utf-8")
        else:
            click.echo(text, nl=False)
