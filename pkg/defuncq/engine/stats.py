from dataclasses import dataclass, fields


@dataclass
class RunStats:
    """Counters gathered during one evaluation. Every counter only grows."""

    dispatched_calls: int = 0
    static_calls: int = 0
    closures_built: int = 0
    nodes_built: int = 0
    env_items_stored: int = 0
    max_closure_depth: int = 0

    def note_closure(self, depth):
        self.closures_built += 1
        self.max_closure_depth = max(self.max_closure_depth, depth)

    def as_dict(self):
        return {_camel(f.name): getattr(self, f.name) for f in fields(self)}


def _camel(name):
    head, *rest = name.split("_")
    return head + "".join(part.capitalize() for part in rest)


STAT_KEYS = tuple(RunStats().as_dict())
