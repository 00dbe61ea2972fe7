"""Capture-avoiding substitution, renaming and call-graph queries."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..syntax import ast
from ..syntax.analysis import free_vars, scoped_children
from ..utils.names import NameSupply


def _enter(binders, mapping, supply, fresh_all=False):
    """
    Moves `mapping` under a scope binding `binders`.

    Binders that would capture a free variable of a replacement are renamed;
    with `fresh_all` every binder is renamed.
    """
    inner = {name: e for name, e in mapping.items() if name not in binders}
    captured = set()
    for replacement in inner.values():
        captured.update(free_vars(replacement))
    renamed = []
    for binder in binders:
        if fresh_all or binder in captured:
            fresh = supply.fresh(binder)
            inner[binder] = ast.VarRef(fresh)
            renamed.append(fresh)
        else:
            renamed.append(binder)
    return tuple(renamed), inner


def _optional(binder, mapping, supply, fresh_all):
    if binder is None:
        return None, dict(mapping)
    (binder,), inner = _enter((binder,), mapping, supply, fresh_all)
    return binder, inner


def substitute(expr, mapping, supply: NameSupply, fresh_all=False):
    """Replaces free variables of `expr` by the expressions in `mapping`."""
    if not mapping and not fresh_all:
        return expr

    def recur(e, m=mapping):
        return substitute(e, m, supply, fresh_all)

    match expr:
        case ast.VarRef(name):
            return mapping.get(name, expr)
        case ast.For(var, source, body):
            (var,), inner = _enter((var,), mapping, supply, fresh_all)
            return ast.For(var, recur(source), recur(body, inner))
        case ast.Let(var, definition, body):
            (var,), inner = _enter((var,), mapping, supply, fresh_all)
            return ast.Let(var, recur(definition), recur(body, inner))
        case ast.FunctionLiteral(params, body):
            params, inner = _enter(params, mapping, supply, fresh_all)
            return ast.FunctionLiteral(params, recur(body, inner))
        case ast.TypeSwitch(scrutinee, cases, default_var, default):
            new_cases = []
            for case in cases:
                var, inner = _optional(case.var, mapping, supply, fresh_all)
                new_cases.append(ast.TypeCase(case.test, var, recur(case.body, inner)))
            default_var, inner = _optional(default_var, mapping, supply, fresh_all)
            return ast.TypeSwitch(
                recur(scrutinee), tuple(new_cases), default_var, recur(default, inner)
            )
        case ast.CaseOf(scrutinee, branches):
            new_branches = []
            for branch in branches:
                variables, inner = _enter(branch.vars, mapping, supply, fresh_all)
                body = recur(branch.body, inner)
                new_branches.append(ast.Branch(branch.label, variables, body))
            return ast.CaseOf(recur(scrutinee), tuple(new_branches))
    return ast.map_children(expr, recur)


def rename(expr, old, new, supply: NameSupply):
    return substitute(expr, {old: ast.VarRef(new)}, supply)


def freshen(expr, supply: NameSupply, mapping=None):
    """Renames every binder inside `expr` to a name fresh in `supply`."""
    return substitute(expr, dict(mapping or {}), supply, fresh_all=True)


def count_free(expr, name) -> int:
    """Occurrences of `name` free in `expr`."""
    match expr:
        case ast.VarRef(other):
            return int(other == name)
    total = 0
    for child, binders in scoped_children(expr):
        if name not in binders:
            total += count_free(child, name)
    return total


def uses_context_item(expr) -> bool:
    """True if `expr` reads the context item outside of any predicate."""
    match expr:
        case ast.ContextItem():
            return True
        case ast.Filter(input, _):
            return uses_context_item(input)
        case ast.FunctionLiteral():
            return False
    return any(uses_context_item(child) for child in ast.children(expr))


@dataclass(frozen=True)
class CallGraph:
    edges: dict  # function name -> names statically called in its body

    @classmethod
    def of(cls, program: ast.Program) -> CallGraph:
        declared = {decl.name for decl in program.decls}
        edges = {
            decl.name: frozenset(
                e.name
                for e in ast.walk(decl.body)
                if isinstance(e, (ast.StaticCall, ast.NamedFunRef))
                and e.name in declared
            )
            for decl in program.decls
        }
        return cls(edges)

    def reachable(self, roots) -> set:
        seen = set()
        stack = list(roots)
        while stack:
            name = stack.pop()
            if name not in seen:
                seen.add(name)
                stack.extend(self.edges.get(name, ()))
        return seen

    def recursive(self) -> set:
        """Functions on a call cycle, self-loops included."""
        return {
            name
            for name, callees in self.edges.items()
            if name in self.reachable(callees)
        }


def called_names(expr) -> set:
    return {
        e.name
        for e in ast.walk(expr)
        if isinstance(e, (ast.StaticCall, ast.NamedFunRef))
    }


def call_sites(program: ast.Program) -> Counter:
    return Counter(
        e.name for e in ast.walk_program(program) if isinstance(e, ast.StaticCall)
    )
