"""
Runtime value model shared by the three engines.

A value is a flat tuple of items. Nodes carry an id that is fresh for every
construction; equality between values ignores ids.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..syntax import ast
from ..utils.errors import EngineTypeError
from ..utils.names import label_name


@dataclass(frozen=True)
class IntAtom:
    value: int


@dataclass(frozen=True)
class StrAtom:
    value: str


@dataclass(frozen=True)
class BoolAtom:
    value: bool


@dataclass(frozen=True)
class UntypedAtom:
    """The atomized content of a node; never stored in a value."""

    value: str


@dataclass(frozen=True, eq=False)
class TextNode:
    id: int
    content: str


@dataclass(frozen=True, eq=False)
class Node:
    id: int
    tag: str
    children: tuple[Union[Node, TextNode], ...]


@dataclass(frozen=True, eq=False)
class ClosureVal:
    """
    A closure of the target engine.

    Inline closures hold their environment; stored closures hold the key of
    their environment in the evaluation's EnvStore and `env` is None.
    """

    label: int
    env: Optional[tuple[Value, ...]] = ()
    key: Optional[int] = None
    depth: int = field(default=1, compare=False)


@dataclass(frozen=True, eq=False)
class FunctionVal:
    """A first-class function of the source engine."""

    params: tuple[str, ...]
    body: ast.Expr
    captured: tuple[tuple[str, Value], ...] = ()
    depth: int = field(default=1, compare=False)

    @property
    def arity(self):
        return len(self.params)


Atom = Union[IntAtom, StrAtom, BoolAtom]
Item = Union[IntAtom, StrAtom, BoolAtom, Node, TextNode, ClosureVal, FunctionVal]
Value = tuple  # tuple[Item, ...]

EMPTY: Value = ()
TRUE: Value = (BoolAtom(True),)
FALSE: Value = (BoolAtom(False),)

ATOMS = (IntAtom, StrAtom, BoolAtom)
NODES = (Node, TextNode)
FUNCTIONS = (ClosureVal, FunctionVal)


def concat_values(values) -> Value:
    items = []
    for value in values:
        items.extend(value)
    assert not any(isinstance(item, tuple) for item in items), "nested sequence"
    return tuple(items)


def boolean(value: bool) -> Value:
    return TRUE if value else FALSE


def atom_text(atom) -> str:
    if isinstance(atom, BoolAtom):
        return "true" if atom.value else "false"
    return str(atom.value)


def string_value(node) -> str:
    if isinstance(node, TextNode):
        return node.content
    return "".join(string_value(child) for child in node.children)


def atomize(item):
    if isinstance(item, ATOMS):
        return item
    if isinstance(item, NODES):
        return UntypedAtom(string_value(item))
    raise EngineTypeError("a function item has no atomic value")


def _items_equal(a, b) -> bool:
    """
    Structural equality that ignores node ids. Stored closures compare by key,
    which only holds within one evaluation; `evaluate` resolves them before
    returning.
    """
    if isinstance(a, ATOMS) or isinstance(b, ATOMS):
        return a == b
    if type(a) is not type(b):
        return False
    if isinstance(a, TextNode):
        return a.content == b.content
    if isinstance(a, Node):
        return (
            a.tag == b.tag
            and len(a.children) == len(b.children)
            and all(map(_items_equal, a.children, b.children))
        )
    if isinstance(a, ClosureVal):
        if a.label != b.label:
            return False
        if a.key is not None or b.key is not None:
            return a.key == b.key
        return len(a.env) == len(b.env) and all(map(values_equal, a.env, b.env))
    return canonical_item(a) == canonical_item(b)


def values_equal(a: Value, b: Value) -> bool:
    return len(a) == len(b) and all(map(_items_equal, a, b))


def canonical_item(item):
    """A hashable rendering of `item` that ignores node ids."""
    match item:
        case IntAtom(value):
            return ("integer", value)
        case StrAtom(value):
            return ("string", value)
        case BoolAtom(value):
            return ("boolean", value)
        case TextNode():
            return ("text", item.content)
        case Node():
            return ("element", item.tag, tuple(map(canonical_item, item.children)))
        case ClosureVal(label, env, key):
            if key is not None:
                return ("closure", label, "key", key)
            return ("closure", label, tuple(map(canonical_value, env)))
        case FunctionVal(params, body, captured):
            captured = tuple((name, canonical_value(v)) for name, v in captured)
            return ("function", params, body, captured)
    raise TypeError(f"not an item: {item!r}")


def canonical_value(value: Value):
    return tuple(map(canonical_item, value))


def node_count(value: Value) -> int:
    """Counts element and text nodes reachable from `value`."""
    total = 0
    stack = [item for item in value if isinstance(item, NODES)]
    while stack:
        node = stack.pop()
        total += 1
        if isinstance(node, Node):
            stack.extend(node.children)
    return total


def _escape(text):
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def serialize_item(item) -> str:
    match item:
        case IntAtom() | StrAtom() | BoolAtom():
            return atom_text(item)
        case TextNode():
            return _escape(item.content)
        case Node():
            if not item.children:
                return f"<{item.tag}/>"
            inner = "".join(serialize_item(child) for child in item.children)
            return f"<{item.tag}>{inner}</{item.tag}>"
        case ClosureVal(label, env, key):
            if key is not None:
                return f"closure {label_name(label)} @{key}"
            slots = ", ".join("(" + serialize(v, " ") + ")" for v in env)
            return f"closure {label_name(label)} [{slots}]"
        case FunctionVal():
            return f"function#{item.arity}"
    raise TypeError(f"not an item: {item!r}")


def serialize(value: Value, separator: str = "\n") -> str:
    """Canonical text form of a value: one item per line."""
    return separator.join(serialize_item(item) for item in value)
