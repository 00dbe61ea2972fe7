"""
Closure simplifications: empty environments become label atoms, calls to
dispatchers with a single branch are inlined, and declarations unreachable
from the main expression are dropped.
"""
from __future__ import annotations

import logging

from ..syntax import ast
from ..syntax.analysis import all_names
from ..utils.names import NameSupply, label_name
from .traversal import CallGraph, called_names
from .unfold import inline_call, is_singleton_dispatcher

logger = logging.getLogger(__name__)


def drop_empty_closures(expr):
    expr = ast.map_children(expr, drop_empty_closures)
    if isinstance(expr, ast.ClosureCtor) and not expr.env:
        return ast.StrLit(label_name(expr.label))
    return expr


def inline_singleton_dispatchers(p: ast.Program) -> ast.Program:
    recursive = CallGraph.of(p).recursive()
    singletons = {
        decl.name: decl
        for decl in p.decls
        if is_singleton_dispatcher(decl) and decl.name not in recursive
    }
    if not singletons:
        return p
    supply = NameSupply(all_names(p))

    def rewrite(expr):
        expr = ast.map_children(expr, rewrite)
        if isinstance(expr, ast.StaticCall) and expr.name in singletons:
            return inline_call(singletons[expr.name], expr.args, supply)
        return expr

    logger.debug("inlining singleton dispatchers %s", sorted(singletons))
    return p.replace_bodies(rewrite)


def remove_dead_declarations(p: ast.Program) -> ast.Program:
    live = CallGraph.of(p).reachable(called_names(p.main))
    decls = tuple(decl for decl in p.decls if decl.name in live)
    if len(decls) != len(p.decls):
        dead = sorted({d.name for d in p.decls} - live)
        logger.debug("removing unreachable declarations %s", dead)
    return ast.Program(decls, p.main)


def simplify(p: ast.Program) -> ast.Program:
    p = p.replace_bodies(drop_empty_closures)
    p = inline_singleton_dispatchers(p)
    return remove_dead_declarations(p)
