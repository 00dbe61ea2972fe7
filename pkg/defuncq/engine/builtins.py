"""
Builtin functions and operators.

Every builtin receives its already evaluated arguments as values and returns
a value. Atomization turns nodes into untyped text, which is cast to the type
of the other operand in comparisons and to integer in arithmetic.
"""
from __future__ import annotations

from ..utils.constants import INT64_MAX, INT64_MIN
from ..utils.errors import (
    DivisionByZero,
    EngineTypeError,
    IntegerOverflow,
    UnknownLabel,
)
from .values import (
    EMPTY,
    BoolAtom,
    IntAtom,
    Node,
    StrAtom,
    TextNode,
    UntypedAtom,
    atom_text,
    atomize,
    boolean,
)


def effective_boolean_value(value) -> bool:
    if not value:
        return False
    head = value[0]
    if isinstance(head, (Node, TextNode)):
        return True
    if len(value) == 1:
        if isinstance(head, BoolAtom):
            return head.value
        if isinstance(head, IntAtom):
            return head.value != 0
    raise EngineTypeError("no effective boolean value")


def _checked(number):
    if not INT64_MIN <= number <= INT64_MAX:
        raise IntegerOverflow(f"{number} does not fit in 64 bits")
    return number


def _single(value, what):
    if len(value) > 1:
        raise EngineTypeError(f"{what} expects at most one item, got {len(value)}")
    return atomize(value[0]) if value else None


def _to_integer(atom, what):
    if isinstance(atom, IntAtom):
        return atom.value
    if isinstance(atom, UntypedAtom):
        try:
            return int(atom.value.strip())
        except ValueError:
            raise EngineTypeError(f"{what}: cannot cast {atom.value!r} to integer")
    raise EngineTypeError(f"{what} expects integers, got {type(atom).__name__}")


def _to_boolean(atom, what):
    if isinstance(atom, BoolAtom):
        return atom.value
    if isinstance(atom, IntAtom):
        return atom.value != 0
    text = atom.value.strip()
    if text in ("true", "1"):
        return True
    if text in ("false", "0"):
        return False
    raise EngineTypeError(f"{what}: cannot cast {atom.value!r} to boolean")


def _integer_args(name, args):
    """The integer operands of `name`, or None if any operand is empty."""
    atoms = [_single(arg, name) for arg in args]
    if any(atom is None for atom in atoms):
        return None
    return [_to_integer(atom, name) for atom in atoms]


def _truncating_division(a, b):
    if b == 0:
        raise DivisionByZero(f"{a} divided by zero")
    quotient = abs(a) // abs(b)
    return quotient if (a < 0) == (b < 0) else -quotient


def _modulo(a, b):
    if b == 0:
        raise DivisionByZero(f"{a} mod zero")
    remainder = abs(a) % abs(b)
    return -remainder if a < 0 else remainder


_ARITHMETIC = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "div": _truncating_division,
    "idiv": _truncating_division,
    "mod": _modulo,
}


def _arithmetic(name):
    operation = _ARITHMETIC[name]

    def apply(left, right):
        operands = _integer_args(name, (left, right))
        if operands is None:
            return EMPTY
        return (IntAtom(_checked(operation(*operands))),)

    return apply


def _comparable(a, b, what):
    """Brings two atoms to a common Python type for comparison."""
    if isinstance(a, UntypedAtom) and isinstance(b, UntypedAtom):
        return a.value, b.value
    if isinstance(a, UntypedAtom):
        b_value, a_value = _comparable(b, a, what)
        return a_value, b_value
    if isinstance(b, UntypedAtom):
        if isinstance(a, IntAtom):
            return a.value, _to_integer(b, what)
        if isinstance(a, BoolAtom):
            return a.value, _to_boolean(b, what)
        return a.value, b.value
    if type(a) is not type(b):
        raise EngineTypeError(
            f"{what}: cannot compare {type(a).__name__} with {type(b).__name__}"
        )
    return a.value, b.value


_COMPARISONS = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def _general_comparison(name):
    compare = _COMPARISONS[name]

    def apply(left, right):
        left_atoms = [atomize(item) for item in left]
        right_atoms = [atomize(item) for item in right]
        return boolean(
            any(
                compare(*_comparable(a, b, name))
                for a in left_atoms
                for b in right_atoms
            )
        )

    return apply


def _distinct_values(seq):
    seen = set()
    result = []
    for item in seq:
        atom = atomize(item)
        if isinstance(atom, UntypedAtom):
            atom = StrAtom(atom.value)
        if atom not in seen:
            seen.add(atom)
            result.append(atom)
    return tuple(result)


def _concat(*args):
    parts = []
    for arg in args:
        atom = _single(arg, "concat")
        parts.append("" if atom is None else atom_text(atom))
    return (StrAtom("".join(parts)),)


def _pow(base, exponent):
    operands = _integer_args("pow", (base, exponent))
    if operands is None:
        return EMPTY
    base, exponent = operands
    if exponent < 0:
        raise EngineTypeError("pow: negative exponent in integer arithmetic")
    if exponent > 64 and abs(base) > 1:
        raise IntegerOverflow(f"pow({base}, {exponent}) does not fit in 64 bits")
    return (IntAtom(_checked(base**exponent)),)


def _extremum(name, pick):
    def apply(left, right):
        a, b = _single(left, name), _single(right, name)
        if a is None or b is None:
            return EMPTY
        a_value, b_value = _comparable(a, b, name)
        chosen = a if pick(a_value, b_value) == a_value else b
        if isinstance(chosen, UntypedAtom):
            chosen = StrAtom(chosen.value)
        return (chosen,)

    return apply


def _range(low, high):
    operands = _integer_args("to", (low, high))
    if operands is None:
        return EMPTY
    return tuple(IntAtom(i) for i in range(operands[0], operands[1] + 1))


def _sum(seq):
    return (IntAtom(_checked(sum(_to_integer(atomize(i), "sum") for i in seq))),)


def _string(arg):
    atom = _single(arg, "string")
    return (StrAtom("" if atom is None else atom_text(atom)),)


def _integer(arg):
    atom = _single(arg, "integer")
    if atom is None:
        return EMPTY
    if isinstance(atom, BoolAtom):
        return (IntAtom(int(atom.value)),)
    if isinstance(atom, StrAtom):
        atom = UntypedAtom(atom.value)
    return (IntAtom(_to_integer(atom, "integer")),)


def _boolean(arg):
    atom = _single(arg, "boolean")
    if atom is None:
        return EMPTY
    if isinstance(atom, StrAtom):
        atom = UntypedAtom(atom.value)
    return boolean(_to_boolean(atom, "boolean"))


def _error(message=EMPTY):
    atom = _single(message, "error")
    raise UnknownLabel(atom_text(atom) if atom is not None else "no matching case")


def _negate(arg):
    operands = _integer_args("neg", (arg,))
    return EMPTY if operands is None else (IntAtom(_checked(-operands[0])),)


BUILTINS = {
    "boolean": _boolean,
    "concat": _concat,
    "count": lambda seq: (IntAtom(len(seq)),),
    "distinct-values": _distinct_values,
    "empty": lambda seq: boolean(not seq),
    "error": _error,
    "exists": lambda seq: boolean(bool(seq)),
    "greatest": _extremum("greatest", max),
    "head": lambda seq: seq[:1],
    "integer": _integer,
    "least": _extremum("least", min),
    "neg": _negate,
    "not": lambda seq: boolean(not effective_boolean_value(seq)),
    "pow": _pow,
    "string": _string,
    "sum": _sum,
    "tail": lambda seq: seq[1:],
    "to": _range,
    "and": lambda a, b: boolean(all(map(effective_boolean_value, (a, b)))),
    "or": lambda a, b: boolean(any(map(effective_boolean_value, (a, b)))),
}
BUILTINS.update({name: _arithmetic(name) for name in _ARITHMETIC})
BUILTINS.update({name: _general_comparison(name) for name in _COMPARISONS})


def call_builtin(name, args):
    try:
        function = BUILTINS[name]
    except KeyError:
        raise EngineTypeError(f"unknown builtin {name}")
    return function(*args)
