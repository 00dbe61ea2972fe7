"""
Whole-program defunctionalization.

Function literals and named function references become closure constructors,
dynamic calls become calls to a dispatcher for their arity. Each closure label
contributes one branch to its dispatcher; function literals are lambda-lifted
into surrogate declarations named after their label.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..rewrite.traversal import rename
from ..syntax import ast
from ..syntax.analysis import all_names, free_vars, validate
from ..utils.constants import CLOSURE_PARAM, DISPATCH_ARG_PREFIX
from ..utils.errors import ValidationError
from ..utils.names import NameSupply, dispatch_name, label_name, parse_label

logger = logging.getLogger(__name__)


@dataclass
class DispatchRegistry:
    by_arity: dict[int, list[ast.Branch]] = field(default_factory=dict)

    def add(self, arity: int, branch: ast.Branch):
        branches = self.by_arity.setdefault(arity, [])
        assert all(b.label != branch.label for b in branches), "label registered twice"
        branches.append(branch)


@dataclass
class LiftedSet:
    decls: list[ast.FunDecl] = field(default_factory=list)

    def add(self, decl: ast.FunDecl):
        self.decls.append(decl)


class LabelGen:
    def __init__(self, start=1):
        self.counter = start

    def next(self) -> int:
        label = self.counter
        self.counter += 1
        return label


def dispatch_params(arity):
    return tuple(f"{DISPATCH_ARG_PREFIX}{i}" for i in range(1, arity + 1))


def _reserved_for(arity):
    return {CLOSURE_PARAM, *dispatch_params(arity)}


def _branch_vars(fv, arity):
    """Branch variables for captured `fv`, clear of the dispatcher's params."""
    reserved = _reserved_for(arity)
    supply = NameSupply(set(fv) | reserved)
    return tuple(supply.fresh(v) if v in reserved else v for v in fv)


def lambda_lift(lit: ast.FunctionLiteral, fv, label, body=None) -> ast.FunDecl:
    """
    The surrogate of `lit`: its parameters followed by its free variables.

    `body` is the already transformed body of the literal, if available.
    """
    params = tuple(lit.params) + tuple(fv)
    return ast.FunDecl(label_name(label), params, lit.body if body is None else body)


class _Defunctionalizer:
    def __init__(self, registry, lifted, labels, declared):
        self.registry = registry
        self.lifted = lifted
        self.labels = labels
        self.declared = declared

    def transform(self, expr):
        match expr:
            case ast.FunctionLiteral(params, body):
                return self._literal(expr, params, body)
            case ast.NamedFunRef(name, arity):
                return self._reference(name, arity)
            case ast.DynamicCall(fun, args):
                fun = self.transform(fun)
                args = tuple(self.transform(arg) for arg in args)
                return ast.StaticCall(dispatch_name(len(args)), (fun,) + args)
        return ast.map_children(expr, self.transform)

    def _literal(self, lit, params, body):
        label = self.labels.next()
        fv = free_vars(lit)
        arity = len(params)
        variables = _branch_vars(fv, arity)
        args = tuple(map(ast.VarRef, dispatch_params(arity) + variables))
        self.registry.add(
            arity,
            ast.Branch(label, variables, ast.StaticCall(label_name(label), args)),
        )
        self.lifted.add(lambda_lift(lit, fv, label, self.transform(body)))
        logger.debug("function literal lifted to %s", label_name(label))
        return ast.ClosureCtor(label, tuple(map(ast.VarRef, fv)))

    def _reference(self, name, arity):
        label = self.labels.next()
        args = tuple(map(ast.VarRef, dispatch_params(arity)))
        if name in self.declared:
            call = ast.StaticCall(name, args)
        else:
            call = ast.BuiltinCall(name, args)
        self.registry.add(arity, ast.Branch(label, (), call))
        logger.debug("reference %s#%d labelled %s", name, arity, label_name(label))
        return ast.ClosureCtor(label, ())


def transform_expr(
    e: ast.Expr,
    reg: DispatchRegistry,
    lifted: LiftedSet,
    gen: LabelGen,
    declared=frozenset(),
) -> ast.Expr:
    """
    Defunctionalizes one expression. `declared` names the user functions, so
    that references to them are not mistaken for builtins.
    """
    return _Defunctionalizer(reg, lifted, gen, declared).transform(e)


def declare_dispatch(n: int, branches) -> ast.FunDecl | None:
    """The dispatcher for arity `n`, or None when no closure of that arity exists."""
    if not branches:
        return None
    reserved = _reserved_for(n)
    arms = []
    for branch in branches:
        clashes = [v for v in branch.vars if v in reserved]
        if clashes:
            used = all_names(ast.Program((), branch.body)) | reserved
            supply = NameSupply(used | set(branch.vars))
            variables, body = list(branch.vars), branch.body
            for name in clashes:
                fresh = supply.fresh(name)
                variables[variables.index(name)] = fresh
                body = rename(body, name, fresh, supply)
            branch = ast.Branch(branch.label, tuple(variables), body)
        arms.append(branch)
    body = ast.CaseOf(ast.VarRef(CLOSURE_PARAM), tuple(arms))
    return ast.FunDecl(dispatch_name(n), (CLOSURE_PARAM,) + dispatch_params(n), body)


def _largest_label(program):
    labels = [0]
    for expr in ast.walk_program(program):
        match expr:
            case ast.ClosureCtor(label, _):
                labels.append(label)
            case ast.CaseOf(_, branches):
                labels.extend(b.label for b in branches)
            case ast.StrLit(value) if parse_label(value) is not None:
                labels.append(parse_label(value))
    labels.extend(filter(None, map(parse_label, (d.name for d in program.decls))))
    return max(labels)


def defunctionalize(p: ast.Program) -> ast.Program:
    diagnostics = validate(p, reserved=False)
    if diagnostics:
        raise ValidationError(diagnostics)
    registry, lifted = DispatchRegistry(), LiftedSet()
    labels = LabelGen(_largest_label(p) + 1)
    declared = frozenset(decl.name for decl in p.decls)
    defunc = _Defunctionalizer(registry, lifted, labels, declared)
    decls = tuple(
        ast.FunDecl(decl.name, decl.params, defunc.transform(decl.body))
        for decl in p.decls
    )
    main = defunc.transform(p.main)
    dispatchers = tuple(
        declare_dispatch(n, registry.by_arity[n]) for n in sorted(registry.by_arity)
    )
    surrogates = tuple(sorted(lifted.decls, key=lambda d: parse_label(d.name)))
    logger.debug(
        "defunctionalized: %d dispatchers, %d surrogates",
        len(dispatchers),
        len(surrogates),
    )
    return ast.Program(dispatchers + surrogates + decls, main)
