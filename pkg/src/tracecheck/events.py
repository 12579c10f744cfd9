"""Event and log data model.

A log is a sequence of events; an event is a kind, an integer timestamp in
microseconds, its position in the log, and a flat map of named values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence, Union

Value = Union[str, int, float, bool]

RESERVED_NAMES = frozenset({"kind", "time", "index"})


class EventKind(str, enum.Enum):
    COMMAND = "COMMAND"
    PRODUCT = "PRODUCT"
    CHANNEL = "CHANNEL"  # periodic state sampling
    CHANGE = "CHANGE"  # observable state change
    EVR = "EVR"  # event report emitted on a transition
    META = "META"  # injected by the tool, never read from raw input

    def __str__(self) -> str:
        return self.value


RAW_KINDS = tuple(k for k in EventKind if k is not EventKind.META)


def is_value(v) -> bool:
    if isinstance(v, float):
        return math.isfinite(v)
    return isinstance(v, (str, int, bool))


def value_key(v: Value) -> tuple:
    """Hashable key distinguishing booleans from numbers.

    Integers and floats of equal magnitude share a key, matching
    ``values_equal`` with a zero tolerance.
    """
    if isinstance(v, bool):
        return ("b", v)
    if isinstance(v, (int, float)):
        return ("n", v)
    return ("s", v)


def values_equal(a: Optional[Value], b: Optional[Value], epsilon: float = 0.0) -> bool:
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, str) or isinstance(b, str):
        return isinstance(a, str) and isinstance(b, str) and a == b
    if epsilon and (isinstance(a, float) or isinstance(b, float)):
        return abs(a - b) <= epsilon
    return a == b


@dataclass(frozen=True, eq=False)
class Event:
    kind: EventKind
    time: int
    index: int = -1
    fields: Mapping[str, Value] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.kind, EventKind):
            object.__setattr__(self, "kind", EventKind(self.kind))
        if isinstance(self.time, bool) or not isinstance(self.time, int):
            raise TypeError(f"event time must be an integer, got {self.time!r}")
        for name, v in self.fields.items():
            if not isinstance(name, str) or not name:
                raise ValueError(f"field names must be nonempty text, got {name!r}")
            if name in RESERVED_NAMES:
                raise ValueError(f"reserved name {name!r} used as a field")
            if not is_value(v):
                raise TypeError(f"field {name!r} has unsupported value {v!r}")
        object.__setattr__(self, "fields", MappingProxyType(dict(self.fields)))

    def get(self, name: str) -> Optional[Value]:
        return event_get(self, name)

    def with_index(self, index: int) -> "Event":
        return Event(self.kind, self.time, index, self.fields)

    def with_time(self, time: int) -> "Event":
        return Event(self.kind, time, self.index, self.fields)

    def _key(self):
        return (
            self.kind,
            self.time,
            self.index,
            tuple(sorted((k, value_key(v)) for k, v in self.fields.items())),
        )

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in sorted(self.fields.items()))
        return f"Event({self.kind.value}@{self.time} #{self.index} {{{inner}}})"


def event_get(e: Event, name: str) -> Optional[Value]:
    if name == "kind":
        return e.kind.value
    if name == "time":
        return e.time
    if name == "index":
        return e.index
    return e.fields.get(name)


def event_equal_under(e1: Event, e2: Event, fields: Iterable[str]) -> bool:
    """Kind equality plus equality of every listed field (both absent counts as equal)."""
    if e1.kind is not e2.kind:
        return False
    return all(values_equal(event_get(e1, n), event_get(e2, n)) for n in fields)


@dataclass(frozen=True)
class Log:
    events: tuple[Event, ...]
    source_id: str = ""

    def __post_init__(self):
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        for i, e in enumerate(events):
            if e.index != i:
                raise ValueError(f"event at position {i} carries index {e.index}")
            if i and events[i - 1].time > e.time:
                raise ValueError(f"log is not time-ordered at index {i}")

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, i):
        return self.events[i]

    def time_ties(self) -> list[tuple[int, ...]]:
        """Groups of non-meta event indices that share a timestamp.

        Their relative order came from input order, not from the clock.
        """
        groups: list[tuple[int, ...]] = []
        run: list[int] = []
        for e in self.events:
            if e.kind is EventKind.META:
                continue
            if run and self.events[run[-1]].time == e.time:
                run.append(e.index)
                continue
            if len(run) > 1:
                groups.append(tuple(run))
            run = [e.index]
        if len(run) > 1:
            groups.append(tuple(run))
        return groups


def make_log(events: Sequence[Event], source_id: str = "") -> Log:
    """Index already-ordered events as a log (no sorting, no meta-events)."""
    return Log(tuple(e.with_index(i) for i, e in enumerate(events)), source_id)
