"""
Lowering of closure forms to first-order data.

The node representation turns a closure into an element named after its
label with one `env` child per environment slot. Every item of a slot gets its
own wrapper: atoms as `<atom><integer>1</integer></atom>` so that unwrapping
restores both value and type, nodes as `<node>...</node>` so that adjacent text
nodes stay apart.

The sequence representation turns a closure into the flat sequence of its
label atom followed by its slots. It is only sound when every slot holds
exactly one non-closure item, see `applicability_seq`.
"""
from __future__ import annotations

import logging

from ..syntax import ast
from ..syntax.analysis import all_names
from ..utils.constants import ATOM_TAG, AUTO, ENV_TAG, NODE, NODE_TAG, SEQ
from ..utils.errors import NotApplicable
from ..utils.names import NameSupply, label_name, parse_label
from .labelflow import applicability_seq

logger = logging.getLogger(__name__)

_ERROR = ast.BuiltinCall("error", ())


def _label_atom(label):
    return ast.StrLit(label_name(label))


def _has_label_atoms(program):
    return any(
        isinstance(e, ast.StrLit) and parse_label(e.value) is not None
        for e in ast.walk_program(program)
    )


def _needs_wrapping(program):
    for expr in ast.walk_program(program):
        match expr:
            case ast.ClosureCtor(_, env) if env:
                return True
            case ast.CaseOf(_, branches) if any(b.vars for b in branches):
                return True
    return False


class _Helpers:
    """Names and declarations of the wrap and unwrap functions."""

    def __init__(self, supply):
        self.wrap = supply.fresh("wrap")
        self.wrap_atom = supply.fresh("wrap-atom")
        self.unwrap = supply.fresh("unwrap")
        self.unwrap_atom = supply.fresh("unwrap-atom")

    def declarations(self):
        x, xs = ast.VarRef("x"), ast.VarRef("xs")
        wrapped = ast.ElementCtor(ATOM_TAG, ast.StaticCall(self.wrap_atom, (x,)))
        boxed = ast.ElementCtor(NODE_TAG, x)
        wrap = ast.For(
            "x",
            xs,
            ast.TypeSwitch(
                x,
                (
                    *(
                        ast.TypeCase(ast.TypeTest(kind), None, wrapped)
                        for kind in ast.ATOM_TYPES
                    ),
                    ast.TypeCase(ast.TypeTest(ast.TEXT), None, boxed),
                    *(
                        ast.TypeCase(ast.TypeTest(ast.ELEMENT, tag), None, boxed)
                        for tag in (ATOM_TAG, NODE_TAG)
                    ),
                ),
                None,
                x,
            ),
        )
        wrap_atom = ast.TypeSwitch(
            x,
            tuple(
                ast.TypeCase(ast.TypeTest(kind), None, ast.ElementCtor(kind, x))
                for kind in ast.ATOM_TYPES
            ),
            None,
            _ERROR,
        )
        content = ast.ChildStep(x, ast.NODE_TEST)
        unwrap = ast.For(
            "x",
            xs,
            ast.TypeSwitch(
                x,
                (
                    ast.TypeCase(
                        ast.TypeTest(ast.ELEMENT, ATOM_TAG),
                        None,
                        ast.StaticCall(self.unwrap_atom, (content,)),
                    ),
                    ast.TypeCase(ast.TypeTest(ast.ELEMENT, NODE_TAG), None, content),
                ),
                None,
                x,
            ),
        )
        text = ast.ChildStep(x, ast.TEXT_TEST)
        unwrap_atom = ast.TypeSwitch(
            x,
            tuple(
                ast.TypeCase(
                    ast.TypeTest(ast.ELEMENT, kind),
                    None,
                    ast.BuiltinCall(kind, (text,)),
                )
                for kind in ast.ATOM_TYPES
            ),
            None,
            _ERROR,
        )
        return (
            ast.FunDecl(self.wrap, ("xs",), wrap),
            ast.FunDecl(self.wrap_atom, ("x",), wrap_atom),
            ast.FunDecl(self.unwrap, ("xs",), unwrap),
            ast.FunDecl(self.unwrap_atom, ("x",), unwrap_atom),
        )


class _NodeLowering:
    def __init__(self, program):
        self.supply = NameSupply(all_names(program))
        self.helpers = _Helpers(self.supply)
        self.atoms = _has_label_atoms(program)

    def lower(self, expr):
        expr = ast.map_children(expr, self.lower)
        match expr:
            case ast.ClosureCtor(label, env):
                slots = tuple(
                    ast.ElementCtor(
                        ENV_TAG, ast.StaticCall(self.helpers.wrap, (slot,))
                    )
                    for slot in env
                )
                return ast.ElementCtor(label_name(label), ast.seq(*slots))
            case ast.CaseOf(scrutinee, branches):
                return self._case_of(scrutinee, branches)
        return expr

    def _case_of(self, scrutinee, branches):
        closure = self.supply.fresh("clos")
        bound = self.supply.fresh("clos")
        cases = []
        for branch in branches:
            body = self._unpack(ast.VarRef(bound), branch)
            test = ast.TypeTest(ast.ELEMENT, label_name(branch.label))
            cases.append(ast.TypeCase(test, bound, body))
        default = _ERROR
        if self.atoms:
            for branch in reversed(branches):
                if not branch.vars:
                    matched = ast.BuiltinCall(
                        "=", (ast.VarRef(closure), _label_atom(branch.label))
                    )
                    default = ast.If(matched, branch.body, default)
        switch = ast.TypeSwitch(ast.VarRef(closure), tuple(cases), None, default)
        return ast.Let(closure, scrutinee, switch)

    def _unpack(self, closure, branch):
        if not branch.vars:
            return branch.body
        env = self.supply.fresh(ENV_TAG)
        body = branch.body
        for index, var in reversed(list(enumerate(branch.vars, start=1))):
            slot = ast.Filter(ast.VarRef(env), ast.IntLit(index))
            content = ast.ChildStep(slot, ast.NODE_TEST)
            body = ast.Let(var, ast.StaticCall(self.helpers.unwrap, (content,)), body)
        return ast.Let(env, ast.ChildStep(closure, ENV_TAG), body)


def lower_node(p: ast.Program) -> ast.Program:
    lowering = _NodeLowering(p)
    lowered = p.replace_bodies(lowering.lower)
    if _needs_wrapping(p):
        helpers = lowering.helpers.declarations()
        lowered = ast.Program(helpers + lowered.decls, lowered.main)
    return lowered


def _lower_seq(expr, supply):
    expr = ast.map_children(expr, lambda child: _lower_seq(child, supply))
    match expr:
        case ast.ClosureCtor(label, env):
            return ast.seq(_label_atom(label), *env)
        case ast.CaseOf(scrutinee, branches):
            closure = ast.VarRef(supply.fresh("clos"))
            head = ast.BuiltinCall("head", (closure,))
            result = _ERROR
            for branch in reversed(branches):
                body = branch.body
                for index, var in reversed(list(enumerate(branch.vars, start=2))):
                    body = ast.Let(var, ast.Filter(closure, ast.IntLit(index)), body)
                matched = ast.BuiltinCall("=", (head, _label_atom(branch.label)))
                result = ast.If(matched, body, result)
            return ast.Let(closure.name, scrutinee, result)
    return expr


def lower_seq(p: ast.Program) -> ast.Program:
    if not applicability_seq(p):
        raise NotApplicable("closures hold sequences or other closures")
    supply = NameSupply(all_names(p))
    return p.replace_bodies(lambda body: _lower_seq(body, supply))


def choose_representation(p: ast.Program, choice: str = AUTO) -> str:
    if choice == AUTO:
        choice = SEQ if applicability_seq(p) else NODE
        logger.info("representation chosen: %s", choice)
    return choice


def lower(p: ast.Program, choice: str = AUTO) -> ast.Program:
    if choose_representation(p, choice) == SEQ:
        return lower_seq(p)
    return lower_node(p)
