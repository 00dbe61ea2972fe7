"""Cancellation of closure construction against closure elimination."""
from __future__ import annotations

import logging

from ..syntax import ast
from ..syntax.analysis import all_names, free_vars
from ..utils.errors import RewriteError
from ..utils.names import NameSupply, label_name, parse_label
from .traversal import rename, substitute

logger = logging.getLogger(__name__)


def _branch_for(label, branches):
    for branch in branches:
        if branch.label == label:
            return branch
    raise RewriteError(f"case-of has no branch for {label_name(label)}")


class _Canceller:
    def __init__(self, program):
        self.supply = NameSupply(all_names(program))
        self.cancelled = 0

    def rewrite(self, expr):
        expr = ast.map_children(expr, self.rewrite)
        match expr:
            case ast.CaseOf(ast.ClosureCtor(label, env), branches):
                branch = _branch_for(label, branches)
                if len(branch.vars) != len(env):
                    raise RewriteError(
                        f"{label_name(label)} has {len(env)} slots, its branch "
                        f"binds {len(branch.vars)}"
                    )
                self.cancelled += 1
                return self._bind_slots(branch, env)
            case ast.CaseOf(ast.StrLit(value), branches) if parse_label(value):
                branch = _branch_for(parse_label(value), branches)
                if branch.vars:
                    raise RewriteError(f"{value} carries no environment")
                self.cancelled += 1
                return branch.body
            case ast.CaseOf(ast.Let(var, definition, inner), branches):
                if any(var in free_vars(b.body) for b in branches):
                    fresh = self.supply.fresh(var)
                    inner, var = rename(inner, var, fresh, self.supply), fresh
                floated = self.rewrite(ast.CaseOf(inner, branches))
                return ast.Let(var, definition, floated)
        return expr

    def _bind_slots(self, branch, env):
        variables, body = branch.vars, branch.body
        captured = set()
        for slot in env:
            captured.update(free_vars(slot))
        if captured & set(variables):
            fresh = tuple(self.supply.fresh(v) for v in variables)
            mapping = {old: ast.VarRef(new) for old, new in zip(variables, fresh)}
            variables, body = fresh, substitute(body, mapping, self.supply)
        for var, slot in reversed(list(zip(variables, env))):
            body = ast.Let(var, slot, body)
        return body


def cancel_case_of(p: ast.Program) -> ast.Program:
    canceller = _Canceller(p)
    result = p.replace_bodies(canceller.rewrite)
    logger.debug("cancelled %d closure eliminations", canceller.cancelled)
    return result
