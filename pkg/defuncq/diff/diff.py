"""
Differential check of the three engines.

The source engine is the reference. Every other configuration (target and
lowered engines, node and, where applicable, seq representations, at each
optimization level) must produce an equal value, or fail with the same kind
of error.
"""
from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from typing import Optional

import click
from deepdiff import DeepDiff

from ..defunc.defunctionalize import defunctionalize
from ..engine.stats import RunStats
from ..engine.values import Value, serialize, values_equal
from ..pipeline import PipelineConfig, read_program, run_program
from ..represent.labelflow import applicability_seq
from ..rewrite.optimize import optimize
from ..utils.constants import (
    EXIT_MISMATCH,
    LOWERED,
    NODE,
    OPT_LEVELS,
    SEQ,
    SOURCE,
    TARGET,
)
from ..utils.errors import EvaluationError, RewriteError
from ..utils.reporting import error, exit_codes, success

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Outcome:
    config: PipelineConfig
    value: Optional[Value] = None
    error: Optional[str] = None
    stats: Optional[RunStats] = None

    @property
    def text(self):
        return self.error if self.error else serialize(self.value)

    @property
    def error_kind(self):
        return self.error.partition(":")[0] if self.error else None

    def agrees_with(self, other: Outcome) -> bool:
        """Equal values, or failures of the same kind."""
        if self.error or other.error:
            return self.error_kind == other.error_kind
        return values_equal(self.value, other.value)


@dataclass(frozen=True)
class Mismatch:
    expected: Outcome
    actual: Outcome

    def delta(self):
        return DeepDiff(
            self.expected.text.splitlines(), self.actual.text.splitlines()
        ).to_dict()


def describe(config: PipelineConfig) -> str:
    if config.engine == SOURCE:
        return SOURCE
    if config.engine == TARGET:
        return f"{TARGET} opt {config.opt}"
    return f"{LOWERED}/{config.repr} opt {config.opt}"


def variants(program, levels=OPT_LEVELS):
    """Configurations checked against the source engine, lowest opt first."""
    for opt in levels:
        base = PipelineConfig(opt=opt)
        yield base.but(engine=TARGET)
        yield base.but(engine=LOWERED, repr=NODE)
        try:
            seq_ok = applicability_seq(optimize(defunctionalize(program), opt))
        except RewriteError:
            seq_ok = False
        if seq_ok:
            yield base.but(engine=LOWERED, repr=SEQ)


def outcome(program, config: PipelineConfig) -> Outcome:
    try:
        value, stats = run_program(program, config)
    except EvaluationError as e:
        return Outcome(config, error=e.tag)
    except RewriteError as e:
        return Outcome(config, error=f"RewriteError: {e}")
    return Outcome(config, value=value, stats=stats)


def find_mismatch(program, levels=OPT_LEVELS) -> Optional[Mismatch]:
    reference = outcome(program, PipelineConfig(engine=SOURCE))
    for config in variants(program, levels):
        candidate = outcome(program, config)
        if not reference.agrees_with(candidate):
            logger.info("mismatch under %s", describe(config))
            return Mismatch(reference, candidate)
    return None


def report(mismatch: Mismatch):
    error(f"Mismatch under {describe(mismatch.actual.config)}")
    click.echo(f"expected ({SOURCE}):\n{mismatch.expected.text}", err=True)
    click.echo(f"actual:\n{mismatch.actual.text}", err=True)
    click.echo(str(mismatch.delta()), err=True)


@click.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@click.option(
    "--opt",
    "levels",
    type=click.Choice([str(level) for level in OPT_LEVELS]),
    multiple=True,
    help="Optimization level to check; may be repeated. All levels by default.",
)
def diff(input_path, levels):
    """
    Runs a program on the source, target and lowered engines and compares
    the results.

    E.g.:
    defuncq diff corpus/programs/group-by-lazy.fq --opt 0 --opt 2
    """
    levels = tuple(sorted(int(level) for level in levels)) or OPT_LEVELS
    with exit_codes():
        program = read_program(input_path)
        mismatch = find_mismatch(program, levels)
    if mismatch:
        report(mismatch)
        sys.exit(EXIT_MISMATCH)
    success("All engines agree.")
