"""Streaming evaluation of compiled automata over a log.

A ``Session`` keeps the frontier of live obligations (HOT and WATCH states
paired with a binding). Obligations spawned while processing event ``i``
only look at events after ``i``. Within one step every live obligation is
tested against the pre-step frontier, HOT completions are applied first
(which may close WATCH windows, exclusive of the closing event), then
WATCH matches become violations, then triggers spawn new instances.

Live obligations are indexed per state by the values of their anchored
fields (literals, and variables already bound), so an event only visits
obligations whose known field values it carries.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Optional, Sequence

from .compiler import Automaton, AutoState, Par, Seq, StateKind, Step
from .events import Event, Log, value_key
from .matching import EMPTY, Binding, match
from .report import PatternResult, Report, Violation, ViolationKind
from .speclang.ast import Bind, Literal
from .speclang.printer import format_constraint


class _Instance:
    __slots__ = ("pattern", "trigger_index", "trigger_time", "binding", "violations")

    def __init__(self, pattern: str, trigger_index: int, trigger_time: int, binding: Binding):
        self.pattern = pattern
        self.trigger_index = trigger_index
        self.trigger_time = trigger_time
        self.binding = binding
        self.violations = 0


class Obligation:
    __slots__ = ("id", "state", "inst", "binding", "activated_at", "parent", "live", "key", "predicates")

    def __init__(self, oid, state, inst, binding, activated_at, parent, predicates):
        self.id = oid
        self.state: AutoState = state
        self.inst: _Instance = inst
        self.binding: Binding = binding
        self.activated_at: int = activated_at
        self.parent = parent
        self.live = True
        self.key = None
        self.predicates = predicates

    @property
    def state_id(self) -> str:
        return self.state.id

    @property
    def origin(self) -> str:
        return self.state.origin

    def __repr__(self):
        return f"Obligation({self.state.id} {self.binding!r} after #{self.activated_at})"


class _SeqFrame:
    __slots__ = ("session", "node", "inst", "parent", "theta", "idx", "pending", "predicates")

    def __init__(self, session, node: Seq, inst, parent, theta, predicates):
        self.session = session
        self.node = node
        self.inst = inst
        self.parent = parent
        self.theta = theta
        self.idx = 0
        self.pending: list[Obligation] = []
        self.predicates = predicates

    def advance(self, pos: int):
        kids = self.node.children
        while self.idx < len(kids):
            child = kids[self.idx]
            if isinstance(child, Step) and child.state.kind is StateKind.WATCH:
                # forbidden child completes at once; its window stays open
                # until the next non-forbidden sibling completes
                ob = self.session._spawn(child.state, self.inst, self.theta, pos, None, self.predicates)
                self.pending.append(ob)
                self.idx += 1
                continue
            self.session._activate(child, self.inst, self.theta, pos, self, self.predicates)
            return
        self.session._complete(self.parent, pos, self.theta)

    def done(self, pos: int, theta: Binding):
        for ob in self.pending:
            self.session._retire(ob)
        self.pending = []
        self.theta = theta
        self.idx += 1
        self.advance(pos)


class _ParFrame:
    __slots__ = ("session", "node", "inst", "parent", "theta", "remaining", "last")

    def __init__(self, session, node: Par, inst, parent, theta):
        self.session = session
        self.node = node
        self.inst = inst
        self.parent = parent
        self.theta = theta
        self.remaining = len(node.children)
        self.last = -1

    def start(self, pos: int, predicates):
        self.last = pos
        for child in self.node.children:
            self.session._activate(child, self.inst, self.theta, pos, self, predicates)

    def done(self, pos: int, theta: Binding):
        # children never export bindings past an unordered scope
        self.remaining -= 1
        self.last = max(self.last, pos)
        if self.remaining == 0:
            self.session._complete(self.parent, self.last, self.theta)


class Session:
    """Single-owner monitoring run over one log."""

    def __init__(self, automata: Sequence[Automaton], source_id: str = "", epsilon: float = 0.0):
        self.automata = list(automata)
        self.source_id = source_id
        self.epsilon = epsilon
        self._results = {a.pattern_name: PatternResult(a.pattern_name) for a in self.automata}
        self._violated: dict[str, int] = defaultdict(int)
        self._by_kind: dict = defaultdict(list)
        for a in self.automata:
            self._by_kind[a.trigger.guard.kind].append(a)
        self._live: dict[int, Obligation] = {}
        # kind -> (state id, anchored field names) -> anchored value keys -> obligations
        self._groups: dict = defaultdict(dict)
        self._next_id = 0
        self._position = -1
        self.spawned = 0
        self.peak_live = 0
        self.finished = False

    # -- frontier bookkeeping ------------------------------------------------

    @property
    def armed(self) -> list[AutoState]:
        return [a.trigger for a in self.automata]

    @property
    def obligations(self) -> list[Obligation]:
        return [self._live[k] for k in sorted(self._live)]

    def _anchor(self, guard, binding) -> tuple:
        """Names and value keys of every field whose expected value is known."""
        names, keys = [], []
        for fc in guard.fields:
            m = fc.matcher
            if isinstance(m, Literal):
                v = m.value
            elif isinstance(m, Bind) and m.var in binding:
                v = binding[m.var]
            else:
                continue
            if self.epsilon and isinstance(v, float):
                continue
            names.append(fc.name)
            keys.append(value_key(v))
        return tuple(names), tuple(keys)

    def _spawn(self, state, inst, binding, pos, parent, predicates) -> Obligation:
        ob = Obligation(self._next_id, state, inst, binding, pos, parent, predicates)
        self._next_id += 1
        self.spawned += 1
        self._live[ob.id] = ob
        names, keys = self._anchor(state.guard, binding)
        group = (state.id, names)
        ob.key = (group, keys)
        index = self._groups[state.guard.kind].get(group)
        if index is None:
            index = self._groups[state.guard.kind][group] = {}
        index.setdefault(keys, {})[ob.id] = ob
        if len(self._live) > self.peak_live:
            self.peak_live = len(self._live)
        return ob

    def _retire(self, ob: Obligation):
        if not ob.live:
            return
        ob.live = False
        del self._live[ob.id]
        group, keys = ob.key
        groups = self._groups[ob.state.guard.kind]
        index = groups[group]
        bucket = index[keys]
        del bucket[ob.id]
        if not bucket:
            del index[keys]
            if not index:
                del groups[group]

    def _activate(self, node, inst, theta, pos, parent, predicates):
        if isinstance(node, Step):
            if node.state.kind is StateKind.HOT:
                self._spawn(node.state, inst, theta, pos, parent, predicates)
            else:
                self._spawn(node.state, inst, theta, pos, None, predicates)
                self._complete(parent, pos, theta)
        elif isinstance(node, Seq):
            _SeqFrame(self, node, inst, parent, theta, predicates).advance(pos)
        else:
            _ParFrame(self, node, inst, parent, theta).start(pos, predicates)

    def _complete(self, parent, pos, theta):
        if parent is not None:
            parent.done(pos, theta)

    def _candidates(self, e: Event) -> list[Obligation]:
        found: dict[int, Obligation] = {}
        fields = e.fields
        for (_, names), index in self._groups.get(e.kind, {}).items():
            keys = []
            for n in names:
                v = fields.get(n)
                if v is None:
                    break
                keys.append(value_key(v))
            else:
                bucket = index.get(tuple(keys))
                if bucket:
                    found.update(bucket)
        return [found[k] for k in sorted(found)]

    def _violation(self, ob: Obligation, kind: ViolationKind, binding, e: Event | None) -> Violation:
        inst = ob.inst
        guard = format_constraint(ob.state.guard)
        if kind is ViolationKind.FORBIDDEN_EVENT:
            msg = f"forbidden event {guard} occurred at event #{e.index}"
        else:
            msg = f"expected {guard} after event #{ob.activated_at}, not seen before end of log"
        v = Violation(
            inst.pattern,
            kind,
            inst.trigger_index,
            binding,
            ob.state.origin,
            e.index if e is not None else None,
            msg,
            inst.trigger_time,
            e.time if e is not None else None,
        )
        if inst.violations == 0:
            self._violated[inst.pattern] += 1
        inst.violations += 1
        self._results[inst.pattern].violations.append(v)
        return v

    # -- public protocol -----------------------------------------------------

    def step(self, e: Event) -> list[Violation]:
        """Feed the next event; returns violations detected at this event."""
        if self.finished:
            raise RuntimeError("session already finished")
        if e.index <= self._position:
            raise ValueError(f"events must be fed in log order (got #{e.index} after #{self._position})")
        self._position = j = e.index
        hot, watch = [], []
        for ob in self._candidates(e):
            if ob.activated_at >= j:
                continue
            theta = match(ob.state.guard, e, ob.binding, ob.predicates, self.epsilon)
            if theta is None:
                continue
            (hot if ob.state.kind is StateKind.HOT else watch).append((ob, theta))
        for ob, theta in hot:
            self._retire(ob)
            self._complete(ob.parent, j, theta)
        out = []
        for ob, theta in watch:
            if not ob.live:  # window closed by a completion at this same event
                continue
            self._retire(ob)
            out.append(self._violation(ob, ViolationKind.FORBIDDEN_EVENT, theta, e))
        for a in self._by_kind.get(e.kind, ()):
            theta = match(a.trigger.guard, e, EMPTY, a.predicates, self.epsilon)
            if theta is None:
                continue
            self._results[a.pattern_name].triggers += 1
            inst = _Instance(a.pattern_name, j, e.time, theta)
            self._activate(a.plan, inst, theta, j, None, a.predicates)
        return out

    def feed(self, events: Iterable[Event]) -> list[Violation]:
        out = []
        for e in events:
            out.extend(self.step(e))
        return out

    def finish(self) -> Report:
        """Close the log: live HOT obligations become MissingEvent violations."""
        if not self.finished:
            self.finished = True
            for ob in self.obligations:
                if ob.state.kind is StateKind.HOT:
                    self._violation(ob, ViolationKind.MISSING_EVENT, ob.binding, None)
                self._retire(ob)
        report = Report(self.source_id)
        for name, res in self._results.items():
            res.satisfied = res.triggers - self._violated[name]
            res.violations.sort(key=Violation.sort_key)
            report.patterns.append(res)
        return report


def new_session(automata: Sequence[Automaton], source_id: str = "", epsilon: float = 0.0) -> Session:
    return Session(automata, source_id, epsilon)


def check(automata: Sequence[Automaton], log: Log | Sequence[Event], epsilon: float = 0.0) -> Report:
    source = log.source_id if isinstance(log, Log) else ""
    s = Session(automata, source, epsilon)
    s.feed(log)
    return s.finish()
