"""Static analyses: free variables, first-order check and validation."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from ..utils.names import DISPATCH_NAME_PATTERN, LABEL_NAME_PATTERN
from . import ast
from .builtins import is_builtin

UNBOUND_VARIABLE = "unbound-variable"
DUPLICATE_DECLARATION = "duplicate-declaration"
DUPLICATE_BINDER = "duplicate-binder"
DUPLICATE_LABEL = "duplicate-label"
ARITY_MISMATCH = "arity-mismatch"
UNKNOWN_FUNCTION = "unknown-function"
RESERVED_NAME = "reserved-name"


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    path: str

    def __str__(self):
        return f"{self.path}: {self.kind}: {self.message}"


@dataclass(frozen=True)
class Violation:
    path: str
    form: str

    def __str__(self):
        return f"{self.path}: {self.form} is not first-order"


def scoped_children(expr: ast.Expr) -> tuple[tuple[ast.Expr, tuple[str, ...]], ...]:
    """Pairs every immediate subexpression with the names bound around it."""
    match expr:
        case ast.For(var, source, body):
            return ((source, ()), (body, (var,)))
        case ast.Let(var, definition, body):
            return ((definition, ()), (body, (var,)))
        case ast.FunctionLiteral(params, body):
            return ((body, params),)
        case ast.TypeSwitch(scrutinee, cases, default_var, default):
            return (
                ((scrutinee, ()),)
                + tuple((c.body, _optional(c.var)) for c in cases)
                + ((default, _optional(default_var)),)
            )
        case ast.CaseOf(scrutinee, branches):
            return ((scrutinee, ()),) + tuple((b.body, b.vars) for b in branches)
    return tuple((child, ()) for child in ast.children(expr))


def _optional(name):
    return () if name is None else (name,)


def _collect_free(expr, bound, found):
    if isinstance(expr, ast.VarRef):
        if expr.name not in bound:
            found.add(expr.name)
        return
    for child, binders in scoped_children(expr):
        _collect_free(child, bound | frozenset(binders) if binders else bound, found)


def free_vars(expr: ast.Expr) -> list[str]:
    found = set()
    _collect_free(expr, frozenset(), found)
    return sorted(found)


def bound_names(expr: ast.Expr) -> set[str]:
    """Every name bound anywhere inside `expr`."""
    names = set()
    for node in ast.walk(expr):
        for _, binders in scoped_children(node):
            names.update(binders)
    return names


def all_names(program: ast.Program) -> set[str]:
    """Variable and function names occurring in `program`."""
    names = set()
    for decl in program.decls:
        names.add(decl.name)
        names.update(decl.params)
    for node in ast.walk_program(program):
        if isinstance(node, ast.VarRef):
            names.add(node.name)
        for _, binders in scoped_children(node):
            names.update(binders)
    return names


def walk_with_paths(program: ast.Program) -> Iterator[tuple[str, ast.Expr]]:
    def visit(expr, path):
        yield path, expr
        for index, child in enumerate(ast.children(expr)):
            yield from visit(child, f"{path}/{type(child).__name__}[{index}]")

    for decl in program.decls:
        yield from visit(decl.body, f"{decl.name}#{decl.arity}")
    yield from visit(program.main, "main")


def check_first_order(program: ast.Program) -> list[Violation]:
    return [
        Violation(path, type(expr).__name__)
        for path, expr in walk_with_paths(program)
        if isinstance(expr, ast.HIGHER_ORDER_FORMS)
    ]


def has_target_forms(program: ast.Program) -> bool:
    return any(isinstance(e, ast.TARGET_FORMS) for e in ast.walk_program(program))


def _duplicates(names):
    return sorted(name for name, count in Counter(names).items() if count > 1)


class _Validator:
    def __init__(self, program, reserved):
        self.program = program
        self.reserved = reserved
        self.diagnostics = []
        self.arities = {}
        for decl in program.decls:
            self.arities.setdefault(decl.name, decl.arity)

    def report(self, kind, message, path):
        self.diagnostics.append(Diagnostic(kind, message, path))

    def run(self):
        for name in _duplicates(d.name for d in self.program.decls):
            self.report(DUPLICATE_DECLARATION, f"function {name} declared twice", name)
        for decl in self.program.decls:
            path = f"{decl.name}#{decl.arity}"
            if self.reserved and (
                LABEL_NAME_PATTERN.match(decl.name)
                or DISPATCH_NAME_PATTERN.match(decl.name)
            ):
                self.report(RESERVED_NAME, f"{decl.name} is a generated name", path)
            for name in _duplicates(decl.params):
                self.report(DUPLICATE_BINDER, f"parameter ${name} repeated", path)
            self.visit(decl.body, frozenset(decl.params), path)
        self.visit(self.program.main, frozenset(), "main")
        return self.diagnostics

    def check_call(self, name, arity, path, reference=False):
        what = f"{name}#{arity}" if reference else f"call to {name}"
        if name in self.arities:
            if self.arities[name] != arity:
                self.report(
                    ARITY_MISMATCH,
                    f"{what} with {arity} arguments, declared with "
                    f"{self.arities[name]}",
                    path,
                )
        elif not is_builtin(name, arity):
            self.report(UNKNOWN_FUNCTION, f"{what}: no such function", path)

    def visit(self, expr, bound, path):
        match expr:
            case ast.VarRef(name) if name not in bound:
                self.report(UNBOUND_VARIABLE, f"${name} is not bound", path)
            case ast.StrLit(value) if self.reserved and LABEL_NAME_PATTERN.match(value):
                self.report(RESERVED_NAME, f"string {value!r} looks like a label", path)
            case ast.StaticCall(name, args):
                self.check_call(name, len(args), path)
            case ast.BuiltinCall(name, args) if not is_builtin(name, len(args)):
                self.report(UNKNOWN_FUNCTION, f"no builtin {name}#{len(args)}", path)
            case ast.NamedFunRef(name, arity):
                self.check_call(name, arity, path, reference=True)
            case ast.FunctionLiteral(params, _):
                for name in _duplicates(params):
                    self.report(DUPLICATE_BINDER, f"parameter ${name} repeated", path)
            case ast.CaseOf(_, branches):
                for label in _duplicates(b.label for b in branches):
                    self.report(DUPLICATE_LABEL, f"label {label} matched twice", path)
                for branch in branches:
                    for name in _duplicates(branch.vars):
                        self.report(DUPLICATE_BINDER, f"${name} bound twice", path)
        for index, (child, binders) in enumerate(scoped_children(expr)):
            child_path = f"{path}/{type(child).__name__}[{index}]"
            self.visit(child, bound | frozenset(binders), child_path)


def validate(program: ast.Program, reserved: bool = True) -> list[Diagnostic]:
    """
    Reports unbound variables, duplicate declarations or binders, unknown
    functions and arity mismatches.

    With `reserved` set (the default, for user input) declarations named like
    generated dispatchers or surrogates and strings shaped like label atoms
    are reported too; compiler output legitimately contains both.
    """
    return _Validator(program, reserved).run()
