"""
Unfolding: let-inlining of simple definitions, FLWOR normalization and
inlining of calls to non-recursive functions.
"""
from __future__ import annotations

import logging

from ..syntax import ast
from ..syntax.analysis import all_names, free_vars
from ..utils.constants import INLINE_SIZE_LIMIT
from ..utils.names import NameSupply, parse_dispatch, parse_label
from .traversal import (
    CallGraph,
    call_sites,
    called_names,
    count_free,
    freshen,
    rename,
    substitute,
    uses_context_item,
)

logger = logging.getLogger(__name__)


def is_simple(expr) -> bool:
    """Literals, variables and closures over simple slots."""
    match expr:
        case ast.IntLit() | ast.StrLit() | ast.BoolLit() | ast.VarRef():
            return True
        case ast.ClosureCtor(_, env):
            return all(map(is_simple, env))
    return False


def is_single_item(expr) -> bool:
    return isinstance(
        expr, (ast.IntLit, ast.StrLit, ast.BoolLit, ast.ClosureCtor, ast.ElementCtor)
    )


def is_known_closure(expr) -> bool:
    if isinstance(expr, ast.ClosureCtor):
        return True
    return isinstance(expr, ast.StrLit) and parse_label(expr.value) is not None


def substitutable(definition, uses) -> bool:
    """Simple definitions that can replace `uses` occurrences without growth."""
    return is_simple(definition) and (uses <= 1 or ast.ast_size(definition) == 1)


def inline_call(decl: ast.FunDecl, args, supply: NameSupply):
    """
    `decl`'s body with fresh binders. Simple arguments replace their
    parameters; the others are let-bound.
    """
    mapping, bindings = {}, []
    for param, arg in zip(decl.params, args):
        if substitutable(arg, count_free(decl.body, param)):
            mapping[param] = arg
        else:
            fresh = supply.fresh(param)
            mapping[param] = ast.VarRef(fresh)
            bindings.append((fresh, arg))
    body = freshen(decl.body, supply, mapping)
    for param, arg in reversed(bindings):
        body = ast.Let(param, arg, body)
    return body


def is_singleton_dispatcher(decl: ast.FunDecl) -> bool:
    return (
        parse_dispatch(decl.name) is not None
        and isinstance(decl.body, ast.CaseOf)
        and len(decl.body.branches) == 1
    )


class _Unfolder:
    def __init__(self, program: ast.Program):
        self.supply = NameSupply(all_names(program))
        self.decls = {decl.name: decl for decl in program.decls}
        self.recursive = CallGraph.of(program).recursive()
        self.sites = call_sites(program)
        self.inlined = set()
        self.changes = 0

    def inlinable(self, name, args):
        decl = self.decls.get(name)
        if decl is None or name in self.recursive or uses_context_item(decl.body):
            return False
        if self.sites[name] == 1 or ast.ast_size(decl.body) <= INLINE_SIZE_LIMIT:
            return True
        if parse_dispatch(name) is not None:
            return is_singleton_dispatcher(decl) or is_known_closure(args[0])
        return False

    def rewrite(self, expr):
        expr = ast.map_children(expr, self.rewrite)
        result = self._step(expr)
        if result is not expr:
            self.changes += 1
        return result

    def _step(self, expr):
        match expr:
            case ast.Let(var, definition, body) if substitutable(
                definition, count_free(body, var)
            ):
                return substitute(body, {var: definition}, self.supply)
            case ast.For(var, ast.For(inner, source, middle), body):
                inner, middle = self._clear(inner, middle, body)
                return ast.For(inner, source, ast.For(var, middle, body))
            case ast.For(var, ast.Let(inner, definition, middle), body):
                inner, middle = self._clear(inner, middle, body)
                return ast.Let(inner, definition, ast.For(var, middle, body))
            case ast.For(var, source, body) if is_single_item(source):
                return ast.Let(var, source, body)
            case ast.StaticCall(name, args) if self.inlinable(name, args):
                logger.debug("inlining call to %s", name)
                self.inlined.add(name)
                return inline_call(self.decls[name], args, self.supply)
        return expr

    def _clear(self, binder, scope, outside):
        """Renames `binder` in `scope` if it would capture in `outside`."""
        if binder not in free_vars(outside):
            return binder, scope
        fresh = self.supply.fresh(binder)
        return fresh, rename(scope, binder, fresh, self.supply)


def unfold(p: ast.Program) -> ast.Program:
    """One bottom-up unfolding pass; inlined functions left unused are dropped."""
    unfolder = _Unfolder(p)
    result = p.replace_bodies(unfolder.rewrite)
    live = CallGraph.of(result).reachable(called_names(result.main))
    decls = tuple(
        decl
        for decl in result.decls
        if decl.name in live or decl.name not in unfolder.inlined
    )
    logger.debug(
        "unfold: %d rewrites, %d inlined declarations dropped",
        unfolder.changes,
        len(result.decls) - len(decls),
    )
    return ast.Program(decls, result.main)
