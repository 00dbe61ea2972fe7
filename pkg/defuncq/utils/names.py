import itertools
import re

from .constants import DISPATCH_PREFIX, LABEL_PREFIX

NAME_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")
LABEL_NAME_PATTERN = re.compile(rf"^{LABEL_PREFIX}([1-9][0-9]*)$")
DISPATCH_NAME_PATTERN = re.compile(rf"^{DISPATCH_PREFIX}(0|[1-9][0-9]*)$")


def label_name(label):
    return f"{LABEL_PREFIX}{label}"


def dispatch_name(arity):
    return f"{DISPATCH_PREFIX}{arity}"


def parse_label(text):
    """Returns the label index of `ell_<k>`, or None for any other name."""
    match = LABEL_NAME_PATTERN.match(text)
    return int(match.group(1)) if match else None


def parse_dispatch(text):
    match = DISPATCH_NAME_PATTERN.match(text)
    return int(match.group(1)) if match else None


class NameSupply:
    """
    Hands out names that collide with nothing seen so far.

    The supply is seeded with every name of a program, so a fresh name can be
    introduced anywhere in that program without capturing a user variable.
    """

    def __init__(self, used=()):
        self._used = set(used)

    def reserve(self, name):
        self._used.add(name)

    def fresh(self, base):
        base = base.rstrip("_") or "v"
        if base not in self._used and not _is_reserved(base):
            self._used.add(base)
            return base
        if _is_reserved(f"{base}_1"):
            base += "v"
        for index in itertools.count(1):
            candidate = f"{base}_{index}"
            if candidate not in self._used:
                self._used.add(candidate)
                return candidate


def _is_reserved(name):
    return bool(LABEL_NAME_PATTERN.match(name) or DISPATCH_NAME_PATTERN.match(name))
