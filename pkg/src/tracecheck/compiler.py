"""Translate patterns into parameterized alternating automata.

Each pattern becomes one automaton:

* the trigger is an ALWAYS state that re-arms forever and, on every match,
  spawns the entry states of the consequence under the match binding;
* a required event is a HOT state that must match before the log ends;
* a forbidden event is a WATCH state that is violated if it ever matches
  while active.

Ordered scopes chain their children (a forbidden child completes at once
for chaining, and a non-final one stays active until the next non-forbidden
sibling completes); unordered scopes spawn all children together and join
when every child is done. The chaining and joining structure is kept in
``Automaton.plan`` for the monitor; ``AutoState.on_match`` lists the states
that may be spawned when a state's guard matches.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

from .matching import PredicateRegistry
from .speclang.ast import (
    ROOT_PATH,
    EventConstraint,
    Forbid,
    Ordered,
    Pattern,
    PredicateCall,
    Require,
    Spec,
    Unordered,
    child_path,
    walk,
)

TRIGGER_ORIGIN = "T"


class StateKind(str, enum.Enum):
    ALWAYS = "ALWAYS"
    HOT = "HOT"
    WATCH = "WATCH"


@dataclass(frozen=True)
class AutoState:
    id: str
    kind: StateKind
    guard: EventConstraint
    on_match: tuple[str, ...] = ()
    deactivate_on: Optional[EventConstraint] = None
    origin: str = ""
    # path of the sibling whose completion closes a non-final WATCH window
    closed_by: Optional[str] = None


@dataclass(frozen=True)
class Step:
    state: AutoState


@dataclass(frozen=True)
class Seq:
    path: str
    children: tuple["PlanNode", ...]


@dataclass(frozen=True)
class Par:
    path: str
    children: tuple["PlanNode", ...]


PlanNode = Union[Step, Seq, Par]


@dataclass(frozen=True)
class Automaton:
    pattern_name: str
    states: Mapping[str, AutoState]
    initial: tuple[str, ...]
    plan: PlanNode
    predicates: Mapping[str, Callable] = field(default_factory=dict, compare=False)

    @property
    def trigger(self) -> AutoState:
        return self.states[self.initial[0]]

    def count(self, kind: StateKind) -> int:
        return sum(1 for s in self.states.values() if s.kind is kind)


def state_id(pattern_name: str, origin: str) -> str:
    return f"{pattern_name}:{origin}"


def _completes_at_once(node) -> bool:
    if isinstance(node, Forbid):
        return True
    if isinstance(node, Require):
        return False
    return all(_completes_at_once(c) for c in node.children)


def entry_leaves(node, path: str = ROOT_PATH) -> list[str]:
    """Leaf paths activated when ``node`` is entered."""
    if isinstance(node, (Require, Forbid)):
        return [path]
    out: list[str] = []
    for i, child in enumerate(node.children):
        out.extend(entry_leaves(child, child_path(path, i)))
        if isinstance(node, Ordered) and not _completes_at_once(child):
            break
    return out


class _Translator:
    def __init__(self, pattern: Pattern, registry: PredicateRegistry | None):
        self.pattern = pattern
        self.registry = registry
        self.nodes = dict(walk(pattern.consequence))
        self.parent: dict[str, tuple[str, int]] = {}
        for path, node in self.nodes.items():
            if isinstance(node, (Ordered, Unordered)):
                for i in range(len(node.children)):
                    self.parent[child_path(path, i)] = (path, i)
        self.predicates: dict[str, Callable] = {}

    def sid(self, origin: str) -> str:
        return state_id(self.pattern.name, origin)

    def follow(self, path: str) -> list[str]:
        """Leaf paths that may activate once the node at ``path`` completes."""
        if path not in self.parent:
            return []
        ppath, i = self.parent[path]
        pnode = self.nodes[ppath]
        if isinstance(pnode, Unordered):
            return self.follow(ppath)
        out: list[str] = []
        for j in range(i + 1, len(pnode.children)):
            child = pnode.children[j]
            out.extend(entry_leaves(child, child_path(ppath, j)))
            if not _completes_at_once(child):
                return out
        return out + self.follow(ppath)

    def closer(self, path: str) -> Optional[str]:
        """Next non-forbidden sibling of a forbidden child in an ordered scope."""
        if path not in self.parent:
            return None
        ppath, i = self.parent[path]
        pnode = self.nodes[ppath]
        if not isinstance(pnode, Ordered):
            return None
        for j in range(i + 1, len(pnode.children)):
            if not isinstance(pnode.children[j], Forbid):
                return child_path(ppath, j)
        return None

    def resolve_predicates(self, c: EventConstraint):
        for fc in c.fields:
            m = fc.matcher
            if isinstance(m, PredicateCall):
                if self.registry is None:
                    PredicateRegistry().resolve(m.name, len(m.args))
                self.predicates[m.name] = self.registry.resolve(m.name, len(m.args))

    def translate(self) -> Automaton:
        p = self.pattern
        self.resolve_predicates(p.trigger)
        states: dict[str, AutoState] = {}
        trig = AutoState(
            self.sid(TRIGGER_ORIGIN),
            StateKind.ALWAYS,
            p.trigger,
            tuple(self.sid(x) for x in entry_leaves(p.consequence)),
            origin=TRIGGER_ORIGIN,
        )
        states[trig.id] = trig
        for path, node in self.nodes.items():
            if isinstance(node, Require):
                self.resolve_predicates(node.constraint)
                states[self.sid(path)] = AutoState(
                    self.sid(path),
                    StateKind.HOT,
                    node.constraint,
                    tuple(self.sid(x) for x in self.follow(path)),
                    origin=path,
                )
            elif isinstance(node, Forbid):
                self.resolve_predicates(node.constraint)
                closer = self.closer(path)
                closing = self.nodes.get(closer) if closer else None
                states[self.sid(path)] = AutoState(
                    self.sid(path),
                    StateKind.WATCH,
                    node.constraint,
                    (),
                    deactivate_on=closing.constraint if isinstance(closing, Require) else None,
                    origin=path,
                    closed_by=closer,
                )
        plan = self.plan(p.consequence, ROOT_PATH, states)
        return Automaton(p.name, states, (trig.id,), plan, dict(self.predicates))

    def plan(self, node, path: str, states) -> PlanNode:
        if isinstance(node, (Require, Forbid)):
            return Step(states[self.sid(path)])
        kids = tuple(self.plan(c, child_path(path, i), states) for i, c in enumerate(node.children))
        return Seq(path, kids) if isinstance(node, Ordered) else Par(path, kids)


def compile_pattern(pattern: Pattern, predicates: PredicateRegistry | Mapping[str, Callable] | None = None) -> Automaton:
    if predicates is not None and not isinstance(predicates, PredicateRegistry):
        predicates = PredicateRegistry(predicates)
    return _Translator(pattern, predicates).translate()


def compile_spec(spec: Spec, predicates: PredicateRegistry | Mapping[str, Callable] | None = None) -> list[Automaton]:
    """One automaton per pattern, in spec order.

    Raises ``UnknownPredicate`` or ``ArityMismatch`` if a predicate call does
    not resolve against ``predicates``.
    """
    if predicates is not None and not isinstance(predicates, PredicateRegistry):
        predicates = PredicateRegistry(predicates)
    return [compile_pattern(p, predicates) for p in spec.patterns]
