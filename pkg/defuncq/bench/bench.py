"""
Timing of static calls against dynamic and dispatched calls.

The benchmarked program declares a unary function `bench`. Its main
expression is replaced by a driver that calls `bench` once per iteration,
either statically or through a function item.
"""
import logging
import time

import click
from tabulate import tabulate

from ..engine.evaluator import EvalOptions, evaluate
from ..pipeline import PipelineConfig, compile_program, read_program
from ..syntax import ast
from ..utils.constants import LOWERED, NODE, OPT_LEVELS, SOURCE
from ..utils.errors import NotApplicable
from ..utils.reporting import exit_codes

logger = logging.getLogger(__name__)

BENCH_FUNCTION = "bench"
REPORTED_STATS = ("dispatchedCalls", "staticCalls", "closuresBuilt")


def _static_driver(iterations):
    call = ast.StaticCall(BENCH_FUNCTION, (ast.VarRef("i"),))
    return _loop(iterations, call)


def _dynamic_driver(iterations):
    call = ast.DynamicCall(ast.VarRef("f"), (ast.VarRef("i"),))
    return ast.Let("f", ast.NamedFunRef(BENCH_FUNCTION, 1), _loop(iterations, call))


def _loop(iterations, call):
    numbers = ast.BuiltinCall("to", (ast.IntLit(1), ast.IntLit(iterations)))
    return ast.BuiltinCall("count", (ast.For("i", numbers, call),))


def variants(program, iterations):
    """(name, compiled program, engine) for every benchmarked variant."""
    if not any(
        d.name == BENCH_FUNCTION and len(d.params) == 1 for d in program.decls
    ):
        raise NotApplicable(f"the program declares no unary {BENCH_FUNCTION}")
    static = ast.Program(program.decls, _static_driver(iterations))
    dynamic = ast.Program(program.decls, _dynamic_driver(iterations))
    lowered = PipelineConfig(engine=LOWERED, repr=NODE)
    yield "static", compile_program(static, lowered.but(opt=0)), LOWERED
    yield "native dynamic", dynamic, SOURCE
    for opt in OPT_LEVELS:
        yield (
            f"dispatched opt {opt}",
            compile_program(dynamic, lowered.but(opt=opt)),
            LOWERED,
        )


def measure(program, iterations):
    rows = []
    for name, compiled, engine in variants(program, iterations):
        started = time.perf_counter()
        _, stats = evaluate(compiled, engine, EvalOptions())
        elapsed = time.perf_counter() - started
        logger.debug("%s took %.4fs", name, elapsed)
        rows.append((name, elapsed, stats.as_dict()))
    return rows


def _table(rows):
    baseline = rows[0][1]
    table = []
    for name, elapsed, stats in rows:
        ratio = elapsed / baseline if baseline else float("nan")
        counters = [stats[key] for key in REPORTED_STATS]
        table.append([name, f"{elapsed * 1000:.1f}", f"{ratio:.2f}"] + counters)
    return table


@click.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@click.option(
    "-n",
    "--iterations",
    type=click.IntRange(min=0),
    default=10000,
    show_default=True,
    help="Number of calls made by every variant.",
)
def bench(input_path, iterations):
    """
    Times static calls against dynamic calls on the source engine and
    dispatched calls at every optimization level.

    E.g.:
    defuncq bench bench.fq --iterations 100000
    """
    with exit_codes():
        program = read_program(input_path)
        if iterations == 0:
            click.echo("No iterations requested.")
            return
        rows = measure(program, iterations)
    header = ["variant", "ms", "ratio"] + list(REPORTED_STATS)
    click.echo(tabulate(_table(rows), header, tablefmt="simple"))
