from __future__ import annotations

from ..utils.names import label_name
from . import ast
from .builtins import (
    ADDITIVE_OPERATORS,
    COMPARISON_OPERATORS,
    MULTIPLICATIVE_OPERATORS,
    NEGATION,
)

INDENT = "  "

# Binding strength; higher binds tighter
_SINGLE = 0
_PRIMARY = 8
_PRECEDENCE = {"or": 1, "and": 2, "to": 4}
_PRECEDENCE.update({op: 3 for op in COMPARISON_OPERATORS})
_PRECEDENCE.update({op: 5 for op in ADDITIVE_OPERATORS})
_PRECEDENCE.update({op: 6 for op in MULTIPLICATIVE_OPERATORS})
_NON_ASSOCIATIVE = set(COMPARISON_OPERATORS) | {"to"}


def _precedence(expr):
    match expr:
        case ast.For() | ast.Let() | ast.If() | ast.TypeSwitch() | ast.CaseOf():
            return _SINGLE
        case ast.BuiltinCall(name, args) if name in _PRECEDENCE and len(args) == 2:
            return _PRECEDENCE[name]
    return _PRIMARY


def _string_literal(value):
    return '"' + value.replace('"', '""') + '"'


class Printer:
    def program(self, program: ast.Program) -> str:
        parts = [self._decl(decl) for decl in program.decls]
        parts.append(self.expr(program.main))
        return "\n\n".join(parts) + "\n"

    def _decl(self, decl):
        params = ", ".join(f"${p}" for p in decl.params)
        body = self.expr(decl.body, _SINGLE, 1)
        return f"declare function {decl.name}({params}) {{\n{INDENT}{body}\n}};"

    def expr(self, expr, context=_SINGLE, depth=0) -> str:
        text = self._render(expr, depth)
        if _precedence(expr) < context:
            return f"({text})"
        return text

    def _newline(self, depth):
        return "\n" + INDENT * depth

    def _list(self, exprs, depth):
        return ", ".join(self.expr(e, _SINGLE, depth) for e in exprs)

    def _enclosed(self, expr, depth):
        if expr == ast.Seq(()):
            return "{}"
        return "{ " + self.expr(expr, _SINGLE, depth + 1) + " }"

    def _render(self, expr, depth):
        nl = self._newline(depth)
        match expr:
            case ast.IntLit(value):
                return f"(-{-value})" if value < 0 else str(value)
            case ast.StrLit(value):
                return _string_literal(value)
            case ast.BoolLit(value):
                return "true()" if value else "false()"
            case ast.VarRef(name):
                return f"${name}"
            case ast.ContextItem():
                return "."
            case ast.For(var, source, body):
                source_text = self.expr(source, _SINGLE, depth + 1)
                body_text = self.expr(body, _SINGLE, depth)
                return f"for ${var} in {source_text}{nl}return {body_text}"
            case ast.Let(var, definition, body):
                definition_text = self.expr(definition, _SINGLE, depth + 1)
                body_text = self.expr(body, _SINGLE, depth)
                return f"let ${var} := {definition_text}{nl}return {body_text}"
            case ast.If(cond, then, else_):
                inner = self._newline(depth + 1)
                return (
                    f"if ({self.expr(cond, _SINGLE, depth + 1)}){nl}"
                    f"then{inner}{self.expr(then, _SINGLE, depth + 1)}{nl}"
                    f"else{inner}{self.expr(else_, _SINGLE, depth + 1)}"
                )
            case ast.Seq(items):
                return f"({self._list(items, depth)})"
            case ast.ChildStep(ast.ContextItem(), test):
                return f"child::{test}"
            case ast.ChildStep(input, test):
                return f"{self.expr(input, _PRIMARY, depth)}/child::{test}"
            case ast.ElementCtor(tag, content):
                return f"element {tag} {self._enclosed(content, depth)}"
            case ast.Filter(input, predicate):
                predicate_text = self.expr(predicate, _SINGLE, depth)
                return f"{self.expr(input, _PRIMARY, depth)}[{predicate_text}]"
            case ast.StaticCall(name, args):
                return f"{name}({self._list(args, depth)})"
            case ast.BuiltinCall(name, (ast.IntLit() as operand,)) if name == NEGATION:
                return f"(-({self.expr(operand, _SINGLE, depth)}))"
            case ast.BuiltinCall(name, (operand,)) if name == NEGATION:
                return f"(-{self.expr(operand, _PRIMARY, depth)})"
            case ast.BuiltinCall(name, (left, right)) if name in _PRECEDENCE:
                level = _PRECEDENCE[name]
                left_context = level + 1 if name in _NON_ASSOCIATIVE else level
                return (
                    f"{self.expr(left, left_context, depth)} {name} "
                    f"{self.expr(right, level + 1, depth)}"
                )
            case ast.BuiltinCall(name, args):
                return f"{name}({self._list(args, depth)})"
            case ast.FunctionLiteral(params, body):
                params_text = ", ".join(f"${p}" for p in params)
                return f"function({params_text}) {self._enclosed(body, depth)}"
            case ast.NamedFunRef(name, arity):
                return f"{name}#{arity}"
            case ast.DynamicCall(fun, args):
                fun_text = self.expr(fun, _PRIMARY, depth)
                if isinstance(fun, ast.FunctionLiteral):
                    fun_text = f"({fun_text})"
                return f"{fun_text}({self._list(args, depth)})"
            case ast.TypeSwitch(scrutinee, cases, default_var, default):
                return self._typeswitch(scrutinee, cases, default_var, default, depth)
            case ast.ClosureCtor(label, env):
                return f"closure {label_name(label)} [{self._list(env, depth)}]"
            case ast.CaseOf(scrutinee, branches):
                return self._case_of(scrutinee, branches, depth)
        raise TypeError(f"cannot print {expr!r}")

    def _typeswitch(self, scrutinee, cases, default_var, default, depth):
        nl = self._newline(depth + 1)
        lines = [f"typeswitch ({self.expr(scrutinee, _SINGLE, depth + 1)})"]
        for case in cases:
            binding = f"${case.var} as " if case.var is not None else ""
            body = self.expr(case.body, _SINGLE, depth + 2)
            lines.append(f"case {binding}{case.test} return {body}")
        binding = f"${default_var} " if default_var is not None else ""
        default = self.expr(default, _SINGLE, depth + 2)
        lines.append(f"default {binding}return {default}")
        return nl.join(lines)

    def _case_of(self, scrutinee, branches, depth):
        head = f"case {self.expr(scrutinee, _SINGLE, depth + 1)} of {{"
        if not branches:
            return head + "}"
        nl = self._newline(depth + 1)
        arms = []
        for branch in branches:
            variables = ", ".join(f"${v}" for v in branch.vars)
            body = self.expr(branch.body, _SINGLE, depth + 2)
            arms.append(f"{label_name(branch.label)} [{variables}] => {body}")
        return head + nl + (" ;" + nl).join(arms) + self._newline(depth) + "}"


def print_program(program: ast.Program) -> str:
    return Printer().program(program)


def print_expr(expr: ast.Expr) -> str:
    return Printer().expr(expr)
