"""
Recursive-descent parser for the query language.

Each `_parse_*` method corresponds to one grammar production and consumes
tokens from the shared stream. Named calls are first parsed as StaticCall and
then resolved: a call to a name that is not declared in the prolog becomes a
BuiltinCall when a builtin of that arity exists.
"""
from __future__ import annotations

import logging

from ..utils.constants import INT64_MAX, INT64_MIN
from ..utils.errors import ParseError
from ..utils.names import parse_label
from . import ast
from .builtins import (
    ADDITIVE_OPERATORS,
    BOOLEAN_LITERALS,
    COMPARISON_OPERATORS,
    MULTIPLICATIVE_OPERATORS,
    NEGATION,
    is_builtin,
)
from .lexer import EOF, INT, KEYWORDS, NAME, STRING, SYMBOL, VAR, tokenize

logger = logging.getLogger(__name__)

RESERVED_FUNCTION_NAMES = KEYWORDS | {"true", "false", "child"}


class Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0

    # Token stream helpers

    def _peek(self, offset=0):
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def _next(self):
        token = self._peek()
        self.pos = min(self.pos + 1, len(self.tokens) - 1)
        return token

    def _error(self, message, expected=(), token=None):
        token = token or self._peek()
        raise ParseError(message, token.line, token.column, expected)

    def _expect_symbol(self, text):
        token = self._peek()
        if not token.is_symbol(text):
            self._error(f"unexpected {token.describe()}", [text])
        return self._next()

    def _expect_word(self, text):
        token = self._peek()
        if not token.is_word(text):
            self._error(f"unexpected {token.describe()}", [text])
        return self._next()

    def _expect_var(self):
        token = self._peek()
        if token.kind != VAR:
            self._error(f"unexpected {token.describe()}", ["$name"])
        return self._next().text

    def _expect_name(self, what="name"):
        token = self._peek()
        if token.kind != NAME:
            self._error(f"unexpected {token.describe()}", [what])
        return self._next().text

    def _accept_symbol(self, text):
        if self._peek().is_symbol(text):
            self._next()
            return True
        return False

    def _accept_word(self, text):
        if self._peek().is_word(text):
            self._next()
            return True
        return False

    # Program

    def parse_program(self):
        decls = []
        while self._peek().is_word("declare"):
            decls.append(self._parse_decl())
            self._expect_symbol(";")
        main = self._parse_expr()
        if self._peek().kind != EOF:
            self._error(f"unexpected {self._peek().describe()}", [",", "end of input"])
        return ast.Program(tuple(decls), main)

    def _parse_decl(self):
        self._expect_word("declare")
        self._expect_word("function")
        token = self._peek()
        name = self._expect_name("function name")
        if name in RESERVED_FUNCTION_NAMES:
            self._error(f"reserved word {name!r} used as a function name", token=token)
        params = self._parse_params()
        body = self._parse_enclosed()
        return ast.FunDecl(name, params, body)

    def _parse_params(self):
        self._expect_symbol("(")
        params = []
        if not self._peek().is_symbol(")"):
            params.append(self._expect_var())
            while self._accept_symbol(","):
                params.append(self._expect_var())
        self._expect_symbol(")")
        return tuple(params)

    def _parse_enclosed(self):
        self._expect_symbol("{")
        if self._accept_symbol("}"):
            return ast.Seq(())
        body = self._parse_expr()
        self._expect_symbol("}")
        return body

    # Expressions

    def _parse_expr(self):
        items = [self._parse_expr_single()]
        while self._accept_symbol(","):
            items.append(self._parse_expr_single())
        return ast.seq(*items)

    def _parse_expr_single(self):
        token = self._peek()
        if token.kind == NAME:
            following = self._peek(1)
            if token.text in ("for", "let") and following.kind == VAR:
                return self._parse_flwor()
            if token.text == "if" and following.is_symbol("("):
                return self._parse_if()
            if token.text == "typeswitch" and following.is_symbol("("):
                return self._parse_typeswitch()
            if token.text == "case":
                return self._parse_case_of()
        return self._parse_binary(0)

    def _parse_flwor(self):
        clauses = []
        while self._peek().is_word("for") or self._peek().is_word("let"):
            keyword = self._next().text
            while True:
                var = self._expect_var()
                if keyword == "for":
                    self._expect_word("in")
                else:
                    self._expect_symbol(":=")
                clauses.append((keyword, var, self._parse_expr_single()))
                if not (self._peek().is_symbol(",") and self._peek(1).kind == VAR):
                    break
                self._next()
        self._expect_word("return")
        body = self._parse_expr_single()
        for keyword, var, bound in reversed(clauses):
            if keyword == "for":
                body = ast.For(var, bound, body)
            else:
                body = ast.Let(var, bound, body)
        return body

    def _parse_if(self):
        self._expect_word("if")
        self._expect_symbol("(")
        cond = self._parse_expr()
        self._expect_symbol(")")
        self._expect_word("then")
        then = self._parse_expr_single()
        self._expect_word("else")
        return ast.If(cond, then, self._parse_expr_single())

    def _parse_typeswitch(self):
        self._expect_word("typeswitch")
        self._expect_symbol("(")
        scrutinee = self._parse_expr()
        self._expect_symbol(")")
        cases = []
        while self._accept_word("case"):
            var = None
            if self._peek().kind == VAR:
                var = self._expect_var()
                self._expect_word("as")
            test = self._parse_type_test()
            self._expect_word("return")
            cases.append(ast.TypeCase(test, var, self._parse_expr_single()))
        if not cases:
            self._error("typeswitch needs at least one case", ["case"])
        self._expect_word("default")
        default_var = self._expect_var() if self._peek().kind == VAR else None
        self._expect_word("return")
        default = self._parse_expr_single()
        return ast.TypeSwitch(scrutinee, tuple(cases), default_var, default)

    def _parse_type_test(self):
        token = self._peek()
        name = self._expect_name("type test")
        if name == ast.ELEMENT:
            self._expect_symbol("(")
            tag = self._expect_name("element name")
            self._expect_symbol(")")
            return ast.TypeTest(ast.ELEMENT, tag)
        if name == ast.TEXT:
            self._expect_symbol("(")
            self._expect_symbol(")")
            return ast.TypeTest(ast.TEXT)
        if name in ast.ATOM_TYPES:
            return ast.TypeTest(name)
        self._error(
            f"unknown type test {name!r}",
            ["element(name)", "text()", *ast.ATOM_TYPES],
            token=token,
        )

    def _parse_case_of(self):
        self._expect_word("case")
        scrutinee = self._parse_expr()
        self._expect_word("of")
        self._expect_symbol("{")
        branches = []
        if not self._peek().is_symbol("}"):
            branches.append(self._parse_branch())
            while self._accept_symbol(";"):
                branches.append(self._parse_branch())
        self._expect_symbol("}")
        return ast.CaseOf(scrutinee, tuple(branches))

    def _parse_label(self):
        token = self._peek()
        label = parse_label(self._expect_name("label"))
        if label is None:
            self._error(f"{token.text!r} is not a label", ["ell_<n>"], token=token)
        return label

    def _parse_branch(self):
        label = self._parse_label()
        self._expect_symbol("[")
        variables = []
        if not self._peek().is_symbol("]"):
            variables.append(self._expect_var())
            while self._accept_symbol(","):
                variables.append(self._expect_var())
        self._expect_symbol("]")
        self._expect_symbol("=>")
        return ast.Branch(label, tuple(variables), self._parse_expr_single())

    # Operators, loosest first. Comparison and range do not associate.
    _LEVELS = (
        (("or",), True),
        (("and",), True),
        (COMPARISON_OPERATORS, False),
        (("to",), False),
        (ADDITIVE_OPERATORS, True),
        (MULTIPLICATIVE_OPERATORS, True),
    )

    def _operator_at(self, level):
        token = self._peek()
        operators, _ = self._LEVELS[level]
        if token.kind in (SYMBOL, NAME) and token.text in operators:
            return token.text
        return None

    def _parse_binary(self, level):
        if level == len(self._LEVELS):
            return self._parse_unary()
        left = self._parse_binary(level + 1)
        associative = self._LEVELS[level][1]
        while True:
            operator = self._operator_at(level)
            if operator is None:
                return left
            self._next()
            right = self._parse_binary(level + 1)
            left = ast.BuiltinCall(operator, (left, right))
            if not associative:
                return left

    def _parse_unary(self):
        if self._accept_symbol("-"):
            if self._peek().kind == INT and not self._postfix_at(1):
                return self._integer(negate=True)
            return ast.BuiltinCall(NEGATION, (self._parse_unary(),))
        if self._accept_symbol("+"):
            return self._parse_unary()
        return self._parse_postfix()

    def _postfix_at(self, offset):
        return any(self._peek(offset).is_symbol(s) for s in ("[", "(", "/"))

    def _integer(self, negate=False):
        token = self._next()
        value = -int(token.text) if negate else int(token.text)
        if not INT64_MIN <= value <= INT64_MAX:
            self._error(
                f"integer literal {token.text} does not fit in 64 bits", token=token
            )
        return ast.IntLit(value)

    def _parse_postfix(self):
        expr = self._parse_primary()
        while True:
            if self._accept_symbol("["):
                predicate = self._parse_expr()
                self._expect_symbol("]")
                expr = ast.Filter(expr, predicate)
            elif self._peek().is_symbol("("):
                expr = ast.DynamicCall(expr, self._parse_args())
            elif self._accept_symbol("/"):
                expr = ast.ChildStep(expr, self._parse_step())
            else:
                return expr

    def _parse_args(self):
        self._expect_symbol("(")
        args = []
        if not self._peek().is_symbol(")"):
            args.append(self._parse_expr_single())
            while self._accept_symbol(","):
                args.append(self._parse_expr_single())
        self._expect_symbol(")")
        return tuple(args)

    def _parse_step(self):
        if self._peek().is_word("child") and self._peek(1).is_symbol("::"):
            self._next()
            self._next()
        return self._parse_node_test()

    def _parse_node_test(self):
        name = self._expect_name("node test")
        if name in ("node", "text") and self._peek().is_symbol("("):
            self._expect_symbol("(")
            self._expect_symbol(")")
            return ast.NODE_TEST if name == "node" else ast.TEXT_TEST
        return name

    def _parse_primary(self):
        token = self._peek()
        if token.kind == INT:
            return self._integer()
        if token.kind == STRING:
            self._next()
            return ast.StrLit(token.text)
        if token.kind == VAR:
            self._next()
            return ast.VarRef(token.text)
        if token.is_symbol("."):
            self._next()
            return ast.ContextItem()
        if token.is_symbol("("):
            self._next()
            if self._accept_symbol(")"):
                return ast.Seq(())
            expr = self._parse_expr()
            self._expect_symbol(")")
            return expr
        if token.kind == NAME:
            return self._parse_named_primary(token)
        self._error(
            f"unexpected {token.describe()}",
            ["expression", "(", "$name", "literal"],
        )

    def _parse_named_primary(self, token):
        following = self._peek(1)
        if token.text == "element" and following.kind == NAME:
            self._next()
            tag = self._expect_name("element name")
            return ast.ElementCtor(tag, self._parse_enclosed())
        if token.text == "function" and following.is_symbol("("):
            self._next()
            params = self._parse_params()
            return ast.FunctionLiteral(params, self._parse_enclosed())
        if token.text == "closure":
            self._next()
            label = self._parse_label()
            self._expect_symbol("[")
            env = []
            if not self._peek().is_symbol("]"):
                env.append(self._parse_expr_single())
                while self._accept_symbol(","):
                    env.append(self._parse_expr_single())
            self._expect_symbol("]")
            return ast.ClosureCtor(label, tuple(env))
        if token.text == "child" and following.is_symbol("::"):
            return ast.ChildStep(ast.ContextItem(), self._parse_step())
        if token.text in KEYWORDS:
            self._error(f"reserved word {token.text!r} out of place", token=token)
        if following.is_symbol("#"):
            self._next()
            self._next()
            arity = self._peek()
            if arity.kind != INT:
                self._error(f"unexpected {arity.describe()}", ["arity"])
            self._next()
            return ast.NamedFunRef(token.text, int(arity.text))
        if following.is_symbol("("):
            self._next()
            args = self._parse_args()
            if token.text in BOOLEAN_LITERALS and not args:
                return ast.BoolLit(BOOLEAN_LITERALS[token.text])
            return ast.StaticCall(token.text, args)
        # A bare name abbreviates child::name
        return ast.ChildStep(ast.ContextItem(), self._parse_node_test())


def resolve_calls(program: ast.Program) -> ast.Program:
    """Turns calls to undeclared names into builtin calls where one exists."""
    declared = {decl.name for decl in program.decls}

    def resolve(expr):
        expr = ast.map_children(expr, resolve)
        if (
            isinstance(expr, ast.StaticCall)
            and expr.name not in declared
            and is_builtin(expr.name, len(expr.args))
        ):
            return ast.BuiltinCall(expr.name, expr.args)
        return expr

    return program.replace_bodies(resolve)


def parse(text: str) -> ast.Program:
    program = resolve_calls(Parser(text).parse_program())
    logger.debug("parsed %d declarations", len(program.decls))
    return program


def parse_expr(text: str) -> ast.Expr:
    """Parses a single expression with no prolog."""
    return parse(text).main
