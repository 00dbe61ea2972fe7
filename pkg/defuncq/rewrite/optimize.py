from __future__ import annotations

import logging
from dataclasses import dataclass

from ..syntax import ast
from ..utils.constants import MAX_FIXPOINT_ROUNDS
from .cancel import cancel_case_of
from .simplify import simplify
from .unfold import unfold

logger = logging.getLogger(__name__)

PASSES = {
    0: (),
    1: (unfold, cancel_case_of),
    2: (unfold, cancel_case_of, simplify),
}


@dataclass(frozen=True)
class OptimizeReport:
    level: int
    rounds: int
    capped: bool
    size_before: int
    size_after: int
    rejected: bool = False  # the last round grew the program and was undone


def optimize_with_report(p: ast.Program, level: int):
    """
    Runs the passes of `level` in rounds until a round changes nothing.

    A round whose result is larger than its input is discarded and ends the
    iteration, so the program never grows.
    """
    passes = PASSES[level]
    size_before = size = ast.program_size(p)
    rounds, capped, rejected = 0, False, False
    while passes:
        if rounds == MAX_FIXPOINT_ROUNDS:
            capped = True
            logger.warning(
                "optimizer stopped after %d rounds without reaching a fixpoint",
                rounds,
            )
            break
        rounds += 1
        q = p
        for rewrite in passes:
            q = rewrite(q)
        if q == p:
            break
        q_size = ast.program_size(q)
        if q_size > size:
            rejected = True
            logger.debug("round %d grew the program to %d nodes", rounds, q_size)
            break
        p, size = q, q_size
    report = OptimizeReport(level, rounds, capped, size_before, size, rejected)
    logger.debug("optimized at level %d: %s", level, report)
    return p, report


def optimize(p: ast.Program, level: int) -> ast.Program:
    return optimize_with_report(p, level)[0]
