"""
Tree-walking evaluator shared by the source, target and lowered engines.

The three engines differ only in which forms they accept and in how they
represent functional values: the source engine builds FunctionVal items for
function literals and named references, the target engine builds ClosureVal
items for closure constructors, and the lowered engine builds neither.
"""
from __future__ import annotations

import itertools
import logging
import sys
from dataclasses import dataclass

from ..represent.envstore import EnvStore
from ..represent.labelflow import Decision, analyze_inlining
from ..syntax import ast
from ..syntax.analysis import check_first_order, free_vars, has_target_forms
from ..syntax.builtins import is_builtin
from ..utils.constants import DISPATCH_ARG_PREFIX, LOWERED, SOURCE, TARGET
from ..utils.errors import (
    ArityMismatch,
    EngineTypeError,
    NotFirstOrder,
    RecursionDepthExceeded,
    UnboundVariable,
    UnknownFunction,
    UnknownLabel,
)
from ..utils.names import parse_dispatch, parse_label
from .builtins import call_builtin, effective_boolean_value
from .stats import RunStats
from .values import (
    ATOMS,
    FUNCTIONS,
    BoolAtom,
    ClosureVal,
    FunctionVal,
    IntAtom,
    Node,
    StrAtom,
    TextNode,
    Value,
    atom_text,
    concat_values,
)

logger = logging.getLogger(__name__)

RECURSION_LIMIT = 8000

_ATOM_CLASSES = {
    ast.INTEGER: IntAtom,
    ast.STRING: StrAtom,
    ast.BOOLEAN: BoolAtom,
}


@dataclass(frozen=True)
class EvalOptions:
    share_env: bool = False


class _NoFocus:
    pass


NO_FOCUS = _NoFocus()


class Evaluator:
    def __init__(self, program: ast.Program, engine: str, options: EvalOptions):
        self.program = program
        self.engine = engine
        self.options = options
        self.functions = {decl.name: decl for decl in program.decls}
        self.stats = RunStats()
        self.store = EnvStore(share=options.share_env)
        self.decisions = analyze_inlining(program) if engine == TARGET else {}
        self._inline_items = 0
        self._ids = itertools.count(1)

    def run(self) -> Value:
        try:
            return self._resolve(self.eval(self.program.main, {}, NO_FOCUS))
        except RecursionError:
            raise RecursionDepthExceeded("evaluation nested too deeply")
        finally:
            self.stats.env_items_stored = (
                self.store.total_stored_items + self._inline_items
            )

    def _resolve(self, value) -> Value:
        """`value` with every stored closure resolved from the store."""
        return tuple(map(self._resolve_item, value))

    def _resolve_item(self, item):
        if not isinstance(item, ClosureVal):
            return item
        env = item.env if item.key is None else self.store.lookup(item.key)
        return ClosureVal(item.label, tuple(map(self._resolve, env)), None, item.depth)

    def eval(self, expr, env, focus) -> Value:
        match expr:
            case ast.IntLit(value):
                return (IntAtom(value),)
            case ast.StrLit(value):
                return (StrAtom(value),)
            case ast.BoolLit(value):
                return (BoolAtom(value),)
            case ast.VarRef(name):
                try:
                    return env[name]
                except KeyError:
                    raise UnboundVariable(f"${name}")
            case ast.ContextItem():
                if focus is NO_FOCUS:
                    raise EngineTypeError("the context item is undefined")
                return (focus,)
            case ast.For(var, source, body):
                return concat_values(
                    self.eval(body, {**env, var: (item,)}, focus)
                    for item in self.eval(source, env, focus)
                )
            case ast.Let(var, definition, body):
                value = self.eval(definition, env, focus)
                return self.eval(body, {**env, var: value}, focus)
            case ast.If(cond, then, else_):
                test = effective_boolean_value(self.eval(cond, env, focus))
                return self.eval(then if test else else_, env, focus)
            case ast.Seq(items):
                return concat_values(self.eval(item, env, focus) for item in items)
            case ast.ChildStep(input, test):
                return self._child_step(self.eval(input, env, focus), test)
            case ast.ElementCtor(tag, content):
                return (self._element(tag, self.eval(content, env, focus)),)
            case ast.Filter(input, predicate):
                return self._filter(self.eval(input, env, focus), predicate, env)
            case ast.StaticCall(name, args):
                values = [self.eval(arg, env, focus) for arg in args]
                return self._call_declared(name, values)
            case ast.BuiltinCall("and", (left, right)):
                if not effective_boolean_value(self.eval(left, env, focus)):
                    return (BoolAtom(False),)
                right = self.eval(right, env, focus)
                return (BoolAtom(effective_boolean_value(right)),)
            case ast.BuiltinCall("or", (left, right)):
                if effective_boolean_value(self.eval(left, env, focus)):
                    return (BoolAtom(True),)
                right = self.eval(right, env, focus)
                return (BoolAtom(effective_boolean_value(right)),)
            case ast.BuiltinCall(name, args):
                return call_builtin(name, [self.eval(arg, env, focus) for arg in args])
            case ast.FunctionLiteral(params, body):
                captured = tuple((name, env[name]) for name in free_vars(expr))
                return (self._function(params, body, captured),)
            case ast.NamedFunRef(name, arity):
                return (self._named_function(name, arity),)
            case ast.DynamicCall(fun, args):
                function = self.eval(fun, env, focus)
                values = [self.eval(arg, env, focus) for arg in args]
                return self._call_dynamic(function, values)
            case ast.TypeSwitch(scrutinee, cases, default_var, default):
                value = self.eval(scrutinee, env, focus)
                for case in cases:
                    if _matches(case.test, value):
                        return self.eval(case.body, _bind(env, case.var, value), focus)
                return self.eval(default, _bind(env, default_var, value), focus)
            case ast.ClosureCtor(label, slots):
                values = tuple(self.eval(slot, env, focus) for slot in slots)
                return (self._closure(label, values),)
            case ast.CaseOf(scrutinee, branches):
                value = self.eval(scrutinee, env, focus)
                return self._case_of(value, branches, env, focus)
        raise EngineTypeError(f"cannot evaluate {type(expr).__name__}")

    # Calls

    def _call_declared(self, name, args):
        decl = self.functions.get(name)
        if decl is None:
            raise UnknownFunction(f"{name}#{len(args)}")
        if len(args) != decl.arity:
            raise ArityMismatch(
                f"{name} expects {decl.arity} arguments, got {len(args)}"
            )
        if self.engine != SOURCE and parse_dispatch(name) is not None:
            self.stats.dispatched_calls += 1
        else:
            self.stats.static_calls += 1
        return self.eval(decl.body, dict(zip(decl.params, args)), NO_FOCUS)

    def _call_dynamic(self, function, args):
        if len(function) != 1 or not isinstance(function[0], FunctionVal):
            raise EngineTypeError("dynamic call target is not a single function item")
        function = function[0]
        if function.arity != len(args):
            raise ArityMismatch(
                f"function of arity {function.arity} applied to {len(args)} arguments"
            )
        self.stats.dispatched_calls += 1
        env = dict(function.captured)
        env.update(zip(function.params, args))
        return self.eval(function.body, env, NO_FOCUS)

    def _function(self, params, body, captured):
        depth = 1 + max((_depth(value) for _, value in captured), default=0)
        self.stats.note_closure(depth)
        return FunctionVal(tuple(params), body, captured, depth)

    def _named_function(self, name, arity):
        params = tuple(f"{DISPATCH_ARG_PREFIX}{i}" for i in range(1, arity + 1))
        args = tuple(ast.VarRef(param) for param in params)
        decl = self.functions.get(name)
        if decl is not None and decl.arity == arity:
            body = ast.StaticCall(name, args)
        elif decl is None and is_builtin(name, arity):
            body = ast.BuiltinCall(name, args)
        else:
            raise UnknownFunction(f"{name}#{arity}")
        return self._function(params, body, ())

    # Closures

    def _closure(self, label, env):
        depth = 1 + max((_depth(value) for value in env), default=0)
        self.stats.note_closure(depth)
        stored = env and (
            self.options.share_env or self.decisions.get(label) == Decision.STORE
        )
        if stored:
            return ClosureVal(label, None, self.store.intern(env), depth)
        self._inline_items += sum(len(value) for value in env)
        return ClosureVal(label, env, None, depth)

    def _case_of(self, value, branches, env, focus):
        label, slots = self._open_closure(value)
        for branch in branches:
            if branch.label != label:
                continue
            if len(branch.vars) != len(slots):
                raise ArityMismatch(
                    f"branch for label {label} binds {len(branch.vars)} slots, "
                    f"closure has {len(slots)}"
                )
            bound = {**env, **dict(zip(branch.vars, slots))}
            return self.eval(branch.body, bound, focus)
        raise UnknownLabel(f"no branch for label {label}")

    def _open_closure(self, value):
        if len(value) == 1:
            item = value[0]
            if isinstance(item, ClosureVal):
                if item.key is not None:
                    return item.label, self.store.lookup(item.key)
                return item.label, item.env
            if isinstance(item, StrAtom) and parse_label(item.value) is not None:
                return parse_label(item.value), ()
        raise UnknownLabel("case-of scrutinee is not a closure")

    # Nodes

    def _fresh_id(self):
        self.stats.nodes_built += 1
        return next(self._ids)

    def _element(self, tag, content):
        children = []
        run, pending = [], []

        def close_atoms():
            if pending:
                run.append(" ".join(pending))
                pending.clear()

        def flush():
            close_atoms()
            text = "".join(run)
            run.clear()
            if text:
                children.append(TextNode(self._fresh_id(), text))

        for item in content:
            if isinstance(item, ATOMS):
                pending.append(atom_text(item))
            elif isinstance(item, TextNode):
                close_atoms()
                run.append(item.content)
            elif isinstance(item, Node):
                flush()
                children.append(self._copy(item))
            else:
                raise EngineTypeError("a function item cannot be element content")
        flush()
        node = Node(self._fresh_id(), tag, tuple(children))
        if self.engine == LOWERED and parse_label(tag) is not None:
            self.stats.note_closure(_label_depth(node))
        return node

    def _copy(self, node):
        if isinstance(node, TextNode):
            return TextNode(self._fresh_id(), node.content)
        children = tuple(self._copy(child) for child in node.children)
        return Node(self._fresh_id(), node.tag, children)

    def _child_step(self, value, test):
        result = []
        for item in value:
            if isinstance(item, TextNode):
                continue
            if not isinstance(item, Node):
                raise EngineTypeError("a child step needs node input")
            result.extend(child for child in item.children if _test(test, child))
        return tuple(result)

    def _filter(self, value, predicate, env):
        selected = []
        for position, item in enumerate(value, start=1):
            result = self.eval(predicate, env, item)
            if len(result) == 1 and isinstance(result[0], IntAtom):
                keep = result[0].value == position
            else:
                keep = effective_boolean_value(result)
            if keep:
                selected.append(item)
        return tuple(selected)


def _bind(env, name, value):
    return env if name is None else {**env, name: value}


def _test(test, node):
    if test == ast.NODE_TEST:
        return True
    if test == ast.TEXT_TEST:
        return isinstance(node, TextNode)
    return isinstance(node, Node) and node.tag == test


def _matches(test: ast.TypeTest, value) -> bool:
    if len(value) != 1:
        return False
    item = value[0]
    if test.kind == ast.ELEMENT:
        return isinstance(item, Node) and item.tag == test.tag
    if test.kind == ast.TEXT:
        return isinstance(item, TextNode)
    return type(item) is _ATOM_CLASSES[test.kind]


def _depth(value):
    return max(
        (item.depth for item in value if isinstance(item, FUNCTIONS)), default=0
    )


def _label_depth(node):
    nested = max(
        (_label_depth(child) for child in node.children if isinstance(child, Node)),
        default=0,
    )
    return nested + 1 if parse_label(node.tag) is not None else nested


def _check_engine(program, engine):
    if engine == SOURCE and has_target_forms(program):
        raise EngineTypeError("the source engine does not accept closure forms")
    if engine == TARGET and check_first_order(program):
        raise EngineTypeError("the target engine does not accept function items")
    if engine == LOWERED:
        violations = check_first_order(program)
        if violations:
            raise NotFirstOrder(str(violations[0]))
        if has_target_forms(program):
            raise NotFirstOrder("closure forms must be lowered first")


def evaluate(
    program: ast.Program, engine: str = TARGET, options: EvalOptions = EvalOptions()
) -> tuple[Value, RunStats]:
    """Evaluates `program` on `engine`, returning its value and statistics."""
    _check_engine(program, engine)
    if sys.getrecursionlimit() < RECURSION_LIMIT:
        sys.setrecursionlimit(RECURSION_LIMIT)
    evaluator = Evaluator(program, engine, options)
    logger.debug("evaluating on the %s engine", engine)
    value = evaluator.run()
    return value, evaluator.stats
