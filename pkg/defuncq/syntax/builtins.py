import math

# name -> (minimum arity, maximum arity)
FUNCTION_SIGNATURES = {
    "boolean": (1, 1),
    "concat": (2, math.inf),
    "count": (1, 1),
    "distinct-values": (1, 1),
    "empty": (1, 1),
    "error": (0, 1),
    "exists": (1, 1),
    "greatest": (2, 2),
    "head": (1, 1),
    "integer": (1, 1),
    "least": (2, 2),
    "not": (1, 1),
    "pow": (2, 2),
    "string": (1, 1),
    "sum": (1, 1),
    "tail": (1, 1),
}

# Infix operators by precedence level, loosest first
OR_OPERATORS = ("or",)
AND_OPERATORS = ("and",)
COMPARISON_OPERATORS = ("=", "!=", "<", "<=", ">", ">=")
RANGE_OPERATORS = ("to",)
ADDITIVE_OPERATORS = ("+", "-")
MULTIPLICATIVE_OPERATORS = ("*", "div", "idiv", "mod")
NEGATION = "neg"

BINARY_OPERATORS = (
    OR_OPERATORS
    + AND_OPERATORS
    + COMPARISON_OPERATORS
    + RANGE_OPERATORS
    + ADDITIVE_OPERATORS
    + MULTIPLICATIVE_OPERATORS
)

# Boolean literals are written as zero-argument calls
BOOLEAN_LITERALS = {"true": True, "false": False}


def is_builtin(name, arity):
    if name in BINARY_OPERATORS:
        return arity == 2
    if name == NEGATION:
        return arity == 1
    low, high = FUNCTION_SIGNATURES.get(name, (1, 0))
    return low <= arity <= high


def is_builtin_name(name):
    return name in FUNCTION_SIGNATURES or name in BINARY_OPERATORS or name == NEGATION
