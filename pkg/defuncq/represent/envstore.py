"""
In-memory environment table.

Closures whose environment is stored hold a key into this table instead of
the environment itself. With sharing on, interning is an upsert: a tuple
structurally equal to a stored one gets the stored key back. A slot holding a
sequence of more than one item is interned as an entry of its own and the
tuple refers to it by key, so closures capturing the same sequence share it.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

from ..engine.values import Value, canonical_value

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SlotRef:
    key: int


class EnvStore:
    def __init__(self, share=True):
        self.share = share
        self.entries: dict[int, tuple] = {}
        self.total_stored_items = 0
        self._index: dict[tuple, int] = {}
        self._keys = itertools.count(1)

    def __len__(self):
        return len(self.entries)

    def intern(self, env: tuple[Value, ...]) -> int:
        slots = tuple(self._slot(value) for value in env)
        return self._upsert(slots)

    def lookup(self, key: int) -> tuple[Value, ...]:
        return tuple(self._resolve(slot) for slot in self.entries[key])

    def _slot(self, value):
        if len(value) > 1:
            return SlotRef(self._upsert((value,)))
        return value

    def _resolve(self, slot):
        if isinstance(slot, SlotRef):
            (value,) = self.entries[slot.key]
            return value
        return slot

    def _upsert(self, slots):
        fingerprint = tuple(
            ("ref", slot.key) if isinstance(slot, SlotRef) else canonical_value(slot)
            for slot in slots
        )
        if self.share and fingerprint in self._index:
            return self._index[fingerprint]
        key = next(self._keys)
        self.entries[key] = slots
        self._index.setdefault(fingerprint, key)
        self.total_stored_items += sum(
            1 if isinstance(slot, SlotRef) else len(slot) for slot in slots
        )
        logger.debug("stored environment %d with %d slots", key, len(slots))
        return key
