"""
Abstract syntax shared by source programs (first-class functions) and target
programs (closure construction and case-of elimination).

Every node is an immutable dataclass; sequences of children are tuples, so
structural equality and hashing come for free and ASTs can be shared freely.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Union

NODE_TEST = "node()"
TEXT_TEST = "text()"

ELEMENT = "element"
TEXT = "text"
INTEGER = "integer"
STRING = "string"
BOOLEAN = "boolean"
ATOM_TYPES = (INTEGER, STRING, BOOLEAN)


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class StrLit:
    value: str


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class For:
    var: str
    source: Expr
    body: Expr


@dataclass(frozen=True)
class Let:
    var: str
    definition: Expr
    body: Expr


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Expr
    else_: Expr


@dataclass(frozen=True)
class Seq:
    items: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class ChildStep:
    input: Expr
    test: str


@dataclass(frozen=True)
class ElementCtor:
    tag: str
    content: Expr


@dataclass(frozen=True)
class Filter:
    input: Expr
    predicate: Expr


@dataclass(frozen=True)
class ContextItem:
    pass


@dataclass(frozen=True)
class StaticCall:
    name: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class BuiltinCall:
    name: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class FunctionLiteral:
    params: tuple[str, ...]
    body: Expr


@dataclass(frozen=True)
class NamedFunRef:
    name: str
    arity: int


@dataclass(frozen=True)
class DynamicCall:
    fun: Expr
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class TypeTest:
    kind: str
    tag: Optional[str] = None

    def __str__(self):
        if self.kind == ELEMENT:
            return f"element({self.tag})"
        return f"{self.kind}()" if self.kind == TEXT else self.kind


@dataclass(frozen=True)
class TypeCase:
    test: TypeTest
    var: Optional[str]
    body: Expr


@dataclass(frozen=True)
class TypeSwitch:
    scrutinee: Expr
    cases: tuple[TypeCase, ...]
    default_var: Optional[str]
    default: Expr


@dataclass(frozen=True)
class ClosureCtor:
    label: int
    env: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Branch:
    label: int
    vars: tuple[str, ...]
    body: Expr


@dataclass(frozen=True)
class CaseOf:
    scrutinee: Expr
    branches: tuple[Branch, ...]


Expr = Union[
    IntLit,
    StrLit,
    BoolLit,
    VarRef,
    For,
    Let,
    If,
    Seq,
    ChildStep,
    ElementCtor,
    Filter,
    ContextItem,
    StaticCall,
    BuiltinCall,
    FunctionLiteral,
    NamedFunRef,
    DynamicCall,
    TypeSwitch,
    ClosureCtor,
    CaseOf,
]

LITERALS = (IntLit, StrLit, BoolLit)
HIGHER_ORDER_FORMS = (FunctionLiteral, NamedFunRef, DynamicCall)
TARGET_FORMS = (ClosureCtor, CaseOf)


@dataclass(frozen=True)
class FunDecl:
    name: str
    params: tuple[str, ...]
    body: Expr

    @property
    def arity(self):
        return len(self.params)


@dataclass(frozen=True)
class Program:
    decls: tuple[FunDecl, ...]
    main: Expr

    def decl(self, name):
        for decl in self.decls:
            if decl.name == name:
                return decl
        return None

    def replace_bodies(self, fn: Callable[[Expr], Expr]) -> Program:
        decls = tuple(FunDecl(d.name, d.params, fn(d.body)) for d in self.decls)
        return Program(decls, fn(self.main))


def seq(*items: Expr) -> Expr:
    """Builds a sequence expression, collapsing the singleton case."""
    if len(items) == 1:
        return items[0]
    return Seq(tuple(items))


def map_children(expr: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Rebuilds `expr` with `fn` applied to each immediate subexpression."""
    match expr:
        case For(var, source, body):
            return For(var, fn(source), fn(body))
        case Let(var, definition, body):
            return Let(var, fn(definition), fn(body))
        case If(cond, then, else_):
            return If(fn(cond), fn(then), fn(else_))
        case Seq(items):
            return Seq(tuple(fn(item) for item in items))
        case ChildStep(input, test):
            return ChildStep(fn(input), test)
        case ElementCtor(tag, content):
            return ElementCtor(tag, fn(content))
        case Filter(input, predicate):
            return Filter(fn(input), fn(predicate))
        case StaticCall(name, args):
            return StaticCall(name, tuple(fn(arg) for arg in args))
        case BuiltinCall(name, args):
            return BuiltinCall(name, tuple(fn(arg) for arg in args))
        case FunctionLiteral(params, body):
            return FunctionLiteral(params, fn(body))
        case DynamicCall(fun, args):
            return DynamicCall(fn(fun), tuple(fn(arg) for arg in args))
        case TypeSwitch(scrutinee, cases, default_var, default):
            return TypeSwitch(
                fn(scrutinee),
                tuple(TypeCase(c.test, c.var, fn(c.body)) for c in cases),
                default_var,
                fn(default),
            )
        case ClosureCtor(label, env):
            return ClosureCtor(label, tuple(fn(slot) for slot in env))
        case CaseOf(scrutinee, branches):
            return CaseOf(
                fn(scrutinee),
                tuple(Branch(b.label, b.vars, fn(b.body)) for b in branches),
            )
    return expr


def children(expr: Expr) -> tuple[Expr, ...]:
    found = []

    def collect(child):
        found.append(child)
        return child

    map_children(expr, collect)
    return tuple(found)


def walk(expr: Expr) -> Iterator[Expr]:
    """Yields `expr` and all of its subexpressions in pre-order."""
    stack = [expr]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(children(current)))


def walk_program(program: Program) -> Iterator[Expr]:
    for decl in program.decls:
        yield from walk(decl.body)
    yield from walk(program.main)


def ast_size(expr: Expr) -> int:
    return sum(1 for _ in walk(expr))


def program_size(program: Program) -> int:
    return sum(1 for _ in walk_program(program))
