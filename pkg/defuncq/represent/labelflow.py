"""
Label-flow analysis over target programs.

For every variable, parameter, function result and closure slot the analysis
computes the set of closure labels that may flow there. Variables are keyed
by (enclosing declaration, name), which merges shadowed bindings inside one
declaration and so only ever adds flow. The result over-approximates which
closures can end up nested in which environments.
"""
from __future__ import annotations

import enum
import logging
from collections import defaultdict
from dataclasses import dataclass

from ..syntax import ast

logger = logging.getLogger(__name__)

MAIN = ""

# Builtins whose result items are items of their arguments
_PASS_THROUGH = frozenset({"head", "tail"})
# Builtins that always return exactly one item
_ALWAYS_SINGLE = frozenset(
    {"=", "!=", "<", "<=", ">", ">=", "and", "or", "not", "empty", "exists"}
    | {"count", "concat", "string", "sum"}
)
# Builtins returning one item when every argument is one item
_SINGLE_IF_ARGS = frozenset({"+", "-", "*", "div", "idiv", "mod", "neg"})


class Decision(enum.Enum):
    INLINE = "inline"
    STORE = "store"


@dataclass(frozen=True)
class LabelDepGraph:
    nodes: frozenset
    edges: frozenset  # of (label, label) pairs

    def successors(self, label):
        return {target for source, target in self.edges if source == label}

    def on_cycle(self, label):
        seen = set()
        stack = list(self.successors(label))
        while stack:
            current = stack.pop()
            if current == label:
                return True
            if current not in seen:
                seen.add(current)
                stack.extend(self.successors(current))
        return False


class LabelFlow:
    def __init__(self, program: ast.Program):
        self.program = program
        self.functions = {d.name: d for d in program.decls}
        self.all_labels = frozenset(
            e.label for e in ast.walk_program(program) if isinstance(e, ast.ClosureCtor)
        )
        self.variables = defaultdict(set)
        self.results = defaultdict(set)
        self.slots = defaultdict(set)  # (label, index) -> labels
        self.single = defaultdict(lambda: True)  # variable -> holds one item
        self.constructors = defaultdict(list)  # label -> [(scope, ClosureCtor)]
        for decl in program.decls:
            self._index_constructors(decl.body, decl.name)
        self._index_constructors(program.main, MAIN)
        self._changed = False
        self._frozen = False
        self._solve()
        self._frozen = True

    def _index_constructors(self, expr, scope):
        for node in ast.walk(expr):
            if isinstance(node, ast.ClosureCtor):
                self.constructors[node.label].append((scope, node))

    # Fixpoint driver

    def _solve(self):
        rounds = 0
        while True:
            rounds += 1
            self._changed = False
            for decl in self.program.decls:
                labels = self._flow(decl.body, decl.name, frozenset())
                self._add(self.results, decl.name, labels)
            self._flow(self.program.main, MAIN, frozenset())
            if not self._changed:
                break
        logger.debug("label flow converged after %d rounds", rounds)

    def _add(self, table, key, labels):
        if not self._frozen and not labels <= table[key]:
            table[key] |= labels
            self._changed = True

    def _mark(self, variable, single):
        if not self._frozen and not single and self.single[variable]:
            self.single[variable] = False
            self._changed = True

    def _bind(self, scope, name, labels, single):
        self._add(self.variables, (scope, name), labels)
        self._mark((scope, name), single)

    # Transfer functions

    def _flow(self, expr, scope, focus):
        """Returns the labels `expr` may evaluate to, recording bindings."""
        match expr:
            case ast.VarRef(name):
                return frozenset(self.variables[(scope, name)])
            case ast.ContextItem():
                return focus
            case ast.ClosureCtor(label, env):
                for index, slot in enumerate(env):
                    labels = self._flow(slot, scope, focus)
                    self._add(self.slots, (label, index), labels)
                return frozenset({label})
            case ast.For(var, source, body):
                self._bind(scope, var, self._flow(source, scope, focus), True)
                return self._flow(body, scope, focus)
            case ast.Let(var, definition, body):
                labels = self._flow(definition, scope, focus)
                self._bind(scope, var, labels, self.is_single(definition, scope))
                return self._flow(body, scope, focus)
            case ast.If(cond, then, else_):
                self._flow(cond, scope, focus)
                return self._flow(then, scope, focus) | self._flow(else_, scope, focus)
            case ast.Filter(input, predicate):
                labels = self._flow(input, scope, focus)
                self._flow(predicate, scope, labels)
                return labels
            case ast.StaticCall(name, args) if name in self.functions:
                decl = self.functions[name]
                for param, arg in zip(decl.params, args):
                    labels = self._flow(arg, scope, focus)
                    self._bind(name, param, labels, self.is_single(arg, scope))
                return frozenset(self.results[name])
            case ast.BuiltinCall(name, args):
                labels = frozenset().union(
                    *(self._flow(arg, scope, focus) for arg in args)
                )
                return labels if name in _PASS_THROUGH else frozenset()
            case ast.TypeSwitch(scrutinee, cases, default_var, default):
                labels = self._flow(scrutinee, scope, focus)
                result = frozenset()
                for case in cases:
                    if case.var is not None:
                        self._bind(scope, case.var, labels, True)
                    result |= self._flow(case.body, scope, focus)
                if default_var is not None:
                    self._bind(
                        scope, default_var, labels, self.is_single(scrutinee, scope)
                    )
                return result | self._flow(default, scope, focus)
            case ast.CaseOf(scrutinee, branches):
                self._flow(scrutinee, scope, focus)
                result = frozenset()
                for branch in branches:
                    for index, var in enumerate(branch.vars):
                        labels = frozenset(self.slots[(branch.label, index)])
                        self._bind(scope, var, labels, self._slot_single(branch, index))
                    result |= self._flow(branch.body, scope, focus)
                return result
            case ast.FunctionLiteral() | ast.NamedFunRef() | ast.DynamicCall():
                for child in ast.children(expr):
                    self._flow(child, scope, frozenset())
                return self.all_labels
        labels = [self._flow(child, scope, focus) for child in ast.children(expr)]
        if isinstance(expr, ast.Seq):
            return frozenset().union(*labels)
        return frozenset()

    def _slot_single(self, branch, index):
        return all(
            index < len(ctor.env) and self.is_single(ctor.env[index], scope)
            for scope, ctor in self.constructors[branch.label]
        )

    # Queries

    def is_single(self, expr, scope) -> bool:
        """True if `expr` certainly evaluates to exactly one item."""
        match expr:
            case ast.IntLit() | ast.StrLit() | ast.BoolLit() | ast.ElementCtor():
                return True
            case ast.ClosureCtor():
                return True
            case ast.VarRef(name):
                return self.single[(scope, name)]
            case ast.BuiltinCall(name, _) if name in _ALWAYS_SINGLE:
                return True
            case ast.BuiltinCall(name, args) if name in _SINGLE_IF_ARGS:
                return all(self.is_single(arg, scope) for arg in args)
        return False

    def graph(self) -> LabelDepGraph:
        edges = frozenset(
            (label, target)
            for (label, _), targets in self.slots.items()
            for target in targets
        )
        return LabelDepGraph(self.all_labels, edges)

    def slots_flat(self) -> bool:
        """True if every slot holds exactly one item and never a closure."""
        if any(self.slots.values()):
            return False
        return all(
            self.is_single(slot, scope)
            for constructors in self.constructors.values()
            for scope, ctor in constructors
            for slot in ctor.env
        )

    def closures_stay_whole(self) -> bool:
        """
        True if no closure with a non-empty environment reaches a position
        that iterates, counts or concatenates its value.
        """
        wide = {
            label
            for label, constructors in self.constructors.items()
            if any(ctor.env for _, ctor in constructors)
        }
        if not wide:
            return True
        for decl in self.program.decls:
            if not self._whole(decl.body, decl.name, wide):
                return False
        return self._whole(self.program.main, MAIN, wide)

    def _whole(self, expr, scope, wide):
        exposed = ()
        match expr:
            case ast.For(_, source, _):
                exposed = (source,)
            case ast.Filter(input, _) | ast.ChildStep(input, _):
                exposed = (input,)
            case ast.Seq(items) if len(items) > 1:
                exposed = items
            case ast.BuiltinCall(_, args):
                exposed = args
            case ast.ElementCtor(_, content):
                exposed = (content,)
        for part in exposed:
            if self._flow(part, scope, self.all_labels) & wide:
                return False
        return all(self._whole(child, scope, wide) for child in ast.children(expr))


def label_dependencies(program: ast.Program) -> LabelDepGraph:
    return LabelFlow(program).graph()


def analyze_inlining(program: ast.Program) -> dict[int, Decision]:
    """Labels on a dependency cycle are stored, the others inlined."""
    graph = label_dependencies(program)
    decisions = {
        label: Decision.STORE if graph.on_cycle(label) else Decision.INLINE
        for label in sorted(graph.nodes)
    }
    logger.debug("closure inlining decisions: %s", decisions)
    return decisions


def applicability_seq(program: ast.Program) -> bool:
    """
    True when every closure slot holds exactly one item that is not a
    closure, so closures can be laid out as flat (label, slot...) sequences.
    """
    flow = LabelFlow(program)
    return (
        not flow.graph().edges and flow.slots_flat() and flow.closures_stay_whole()
    )
