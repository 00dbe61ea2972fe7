"""
Random source programs for differential testing.

Expressions are generated against a small type discipline (integers, integer
sequences and functions of a fixed arity) so that every program is closed,
calls functions only with the right number of arguments and never returns,
atomizes or compares a function item. Declared functions may only call
functions declared before them, so every program terminates.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from ..syntax import ast
from ..utils.constants import (
    DEFAULT_ATOM_POOL,
    DEFAULT_MAX_ARITY,
    DEFAULT_MAX_DEPTH,
    DEFAULT_SEED,
)

INT = "int"
SEQ = "seq"
ELEMENT = "element"

MAX_DECLARATIONS = 2

# Builtins usable as named references, by arity
_NAMED_BUILTINS = {
    1: ("count", "sum", "head", "exists"),
    2: ("greatest", "least", "pow"),
}


@dataclass(frozen=True)
class FunType:
    arity: int


@dataclass(frozen=True)
class GenConfig:
    seed: int = DEFAULT_SEED
    max_depth: int = DEFAULT_MAX_DEPTH
    max_arity: int = DEFAULT_MAX_ARITY
    atom_pool: tuple = DEFAULT_ATOM_POOL


@dataclass(frozen=True)
class _Signature:
    name: str
    params: tuple  # of types
    result: str


class _Generator:
    def __init__(self, config: GenConfig):
        self.config = config
        self.random = random.Random(config.seed)
        self.counter = 0
        self.signatures = []

    def fresh(self, base):
        self.counter += 1
        return f"{base}{self.counter}"

    def chance(self, p):
        return self.random.random() < p

    def arity(self):
        return self.random.randint(0, min(self.config.max_arity, 2))

    # Program structure

    def program(self) -> ast.Program:
        decls = []
        for _ in range(self.random.randint(0, MAX_DECLARATIONS)):
            decls.append(self.declaration())
        result = self.random.choice((INT, SEQ, ELEMENT))
        if result == ELEMENT:
            content = self.expr(SEQ, self.config.max_depth, {})
            main = ast.ElementCtor("result", content)
        else:
            main = self.expr(result, self.config.max_depth, {})
        return ast.Program(tuple(decls), main)

    def declaration(self) -> ast.FunDecl:
        name = self.fresh("f")
        types = [
            self.random.choice((INT, SEQ, FunType(1)))
            for _ in range(self.random.randint(1, 2))
        ]
        params = tuple(self.fresh("p") for _ in types)
        result = self.random.choice((INT, SEQ))
        scope = dict(zip(params, types))
        body = self.expr(result, max(self.config.max_depth - 1, 1), scope)
        self.signatures.append(_Signature(name, tuple(types), result))
        return ast.FunDecl(name, params, body)

    # Expressions

    def expr(self, kind, depth, scope):
        if isinstance(kind, FunType):
            return self.function(kind.arity, depth, scope)
        if depth <= 0:
            return self.leaf(kind, scope)
        if kind == INT:
            return self.integer(depth, scope)
        return self.sequence(depth, scope)

    def variables(self, kind, scope):
        matching = [name for name, t in scope.items() if t == kind]
        if kind == SEQ:
            matching += [name for name, t in scope.items() if t == INT]
        return sorted(matching)

    def literal(self):
        return ast.IntLit(self.random.choice(self.config.atom_pool))

    def leaf(self, kind, scope):
        names = self.variables(kind, scope)
        if names and self.chance(0.6):
            return ast.VarRef(self.random.choice(names))
        if kind == SEQ and self.chance(0.3):
            items = self.random.randint(0, 3)
            return ast.seq(*(self.literal() for _ in range(items)))
        return self.literal()

    def bind(self, kind, depth, scope, body_kind):
        var = self.fresh("v")
        definition = self.expr(kind, depth - 1, scope)
        body = self.expr(body_kind, depth - 1, {**scope, var: kind})
        return ast.Let(var, definition, body)

    def integer(self, depth, scope):
        choice = self.random.randrange(9)
        if choice == 0:
            return self.leaf(INT, scope)
        if choice == 1:
            op = self.random.choice(("+", "-", "*"))
            left = self.expr(INT, depth - 1, scope)
            right = self.expr(INT, depth - 1, scope)
            return ast.BuiltinCall(op, (left, right))
        if choice == 2:
            divisor = ast.IntLit(self.random.randint(2, 4))
            return ast.BuiltinCall("mod", (self.expr(INT, depth - 1, scope), divisor))
        if choice == 3:
            name = self.random.choice(("count", "sum"))
            return ast.BuiltinCall(name, (self.expr(SEQ, depth - 1, scope),))
        if choice == 4:
            return ast.If(
                self.condition(depth - 1, scope),
                self.expr(INT, depth - 1, scope),
                self.expr(INT, depth - 1, scope),
            )
        if choice == 5:
            kind = self.random.choice((INT, SEQ, FunType(self.arity())))
            return self.bind(kind, depth, scope, INT)
        if choice in (6, 7):
            return self.dynamic_call(depth, scope)
        return self.static_call(INT, depth, scope) or self.leaf(INT, scope)

    def sequence(self, depth, scope):
        choice = self.random.randrange(9)
        if choice == 0:
            return self.leaf(SEQ, scope)
        if choice == 1:
            items = self.random.randint(0, 3)
            return ast.seq(*(self.expr(INT, depth - 1, scope) for _ in range(items)))
        if choice == 2:
            var = self.fresh("x")
            source = self.expr(SEQ, depth - 1, scope)
            kind = self.random.choice((INT, SEQ))
            body = self.expr(kind, depth - 1, {**scope, var: INT})
            return ast.For(var, source, body)
        if choice == 3:
            source = self.expr(SEQ, depth - 1, scope)
            return ast.Filter(source, self.predicate(depth - 1, scope))
        if choice == 4:
            low, high = self.literal(), self.literal()
            return ast.BuiltinCall("to", (low, high))
        if choice == 5:
            name = self.random.choice(("tail", "distinct-values"))
            return ast.BuiltinCall(name, (self.expr(SEQ, depth - 1, scope),))
        if choice == 6:
            return self.function_loop(depth, scope)
        if choice == 7:
            kind = self.random.choice((INT, SEQ, FunType(self.arity())))
            return self.bind(kind, depth, scope, SEQ)
        return self.static_call(SEQ, depth, scope) or self.expr(INT, depth - 1, scope)

    def condition(self, depth, scope):
        op = self.random.choice(("=", "!=", "<", ">="))
        left = self.expr(INT, depth, scope)
        right = self.expr(INT, depth, scope)
        condition = ast.BuiltinCall(op, (left, right))
        if self.chance(0.2):
            condition = ast.BuiltinCall("not", (condition,))
        return condition

    def predicate(self, depth, scope):
        """A predicate over the context item, possibly through a function."""
        if self.chance(0.2):
            return ast.IntLit(self.random.randint(1, 3))
        item = ast.ContextItem()
        unary = self.variables(FunType(1), scope)
        if unary and self.chance(0.5):
            item = ast.DynamicCall(ast.VarRef(self.random.choice(unary)), (item,))
        elif self.chance(0.5):
            item = ast.BuiltinCall("mod", (item, ast.IntLit(2)))
        op = self.random.choice(("=", "!=", ">", "<="))
        return ast.BuiltinCall(op, (item, self.expr(INT, max(depth - 1, 0), scope)))

    # Functions

    def function(self, arity, depth, scope):
        names = self.variables(FunType(arity), scope)
        choice = self.random.randrange(5)
        if choice == 0 and names:
            return ast.VarRef(self.random.choice(names))
        if choice == 1 and arity in _NAMED_BUILTINS:
            return ast.NamedFunRef(self.random.choice(_NAMED_BUILTINS[arity]), arity)
        if choice == 2:
            declared = [
                s
                for s in self.signatures
                if s.params == tuple([INT] * arity) and s.result == INT
            ]
            if declared:
                return ast.NamedFunRef(self.random.choice(declared).name, arity)
        if choice == 3 and depth > 1:
            return ast.If(
                self.condition(depth - 1, scope),
                self.function(arity, depth - 1, scope),
                self.function(arity, depth - 1, scope),
            )
        params = tuple(self.fresh("a") for _ in range(arity))
        inner = {**scope, **{param: INT for param in params}}
        body = self.expr(INT, max(depth - 1, 0), inner)
        return ast.FunctionLiteral(params, body)

    def dynamic_call(self, depth, scope):
        arity = self.arity()
        fun = self.function(arity, depth - 1, scope)
        args = tuple(self.expr(INT, depth - 1, scope) for _ in range(arity))
        return ast.DynamicCall(fun, args)

    def function_loop(self, depth, scope):
        """Iterates over a sequence of functions, applying each one."""
        var = self.fresh("g")
        funs = tuple(self.function(1, depth - 1, scope) for _ in range(2))
        arg = self.expr(INT, depth - 1, scope)
        call = ast.DynamicCall(ast.VarRef(var), (arg,))
        return ast.For(var, ast.Seq(funs), call)

    def static_call(self, result, depth, scope):
        candidates = [s for s in self.signatures if s.result == result]
        if not candidates:
            return None
        signature = self.random.choice(candidates)
        args = tuple(self.expr(kind, depth - 1, scope) for kind in signature.params)
        return ast.StaticCall(signature.name, args)


def gen_program(config: GenConfig = GenConfig()) -> ast.Program:
    """A random closed source program, deterministic in `config.seed`."""
    return _Generator(config).program()
