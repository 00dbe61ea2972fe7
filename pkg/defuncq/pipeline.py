"""
Assembly of the compiler passes.

A source program is defunctionalized, optimized at the requested level and,
for the lowered engine, lowered to a closure representation. The source
engine runs the program as written.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .defunc.defunctionalize import defunctionalize
from .engine.evaluator import EvalOptions, evaluate
from .represent.lowering import lower
from .rewrite.optimize import optimize
from .syntax import ast
from .syntax.analysis import check_first_order, has_target_forms, validate
from .syntax.parser import parse
from .utils.constants import (
    DEFAULT_ENGINE,
    DEFAULT_OPT,
    DEFAULT_REPR,
    DEFAULT_SEED,
    LOWERED,
    SOURCE,
)
from .utils.errors import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    engine: str = DEFAULT_ENGINE
    repr: str = DEFAULT_REPR
    opt: int = DEFAULT_OPT
    share_env: bool = False
    seed: int = DEFAULT_SEED
    stats_out: Optional[str] = None

    def but(self, **changes) -> PipelineConfig:
        return replace(self, **changes)


def load_program(text: str) -> ast.Program:
    """Parses and validates a user program."""
    program = parse(text)
    diagnostics = validate(program)
    if diagnostics:
        raise ValidationError(diagnostics)
    return program


def read_program(path) -> ast.Program:
    return load_program(Path(path).read_text(encoding="utf-8"))


def compile_program(program: ast.Program, config: PipelineConfig) -> ast.Program:
    """
    The program the configured engine runs. Programs without function items
    are already first-order and run as written on every engine.
    """
    if config.engine == SOURCE or not (
        check_first_order(program) or has_target_forms(program)
    ):
        return program
    target = optimize(defunctionalize(program), config.opt)
    if config.engine != LOWERED:
        return target
    return lower(target, config.repr)


def run_program(program: ast.Program, config: PipelineConfig):
    compiled = compile_program(program, config)
    logger.debug("running on the %s engine at opt %d", config.engine, config.opt)
    return evaluate(compiled, config.engine, EvalOptions(share_env=config.share_env))
