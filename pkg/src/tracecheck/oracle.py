"""Reference semantics by direct recursion over the pattern tree.

Used to cross-check the streaming monitor on small logs. For every trigger
match at position ``i`` the consequence is evaluated over positions after
``i``: a requirement completes at its earliest match, a forbidden event is
violated by its first match inside its window, ordered scopes fold left to
right and unordered scopes evaluate each child from the scope entry.
"""

from __future__ import annotations

from typing import Callable, Mapping, Optional, Sequence

from .errors import LogTooLarge
from .events import Event, Log
from .matching import EMPTY, Binding, PredicateRegistry, match
from .report import PatternResult, Report, Violation, ViolationKind
from .speclang.ast import ROOT_PATH, Forbid, Ordered, Require, Spec, Unordered, child_path

DEFAULT_MAX_EVENTS = 64


class _Eval:
    def __init__(self, pattern, events: Sequence[Event], predicates, epsilon):
        self.pattern = pattern
        self.events = events
        self.predicates = predicates
        self.epsilon = epsilon
        self.found: list[tuple] = []

    def m(self, c, j, theta):
        return match(c, self.events[j], theta, self.predicates, self.epsilon)

    def forbid(self, node: Forbid, path: str, theta: Binding, after: int, until: Optional[int]):
        end = len(self.events) if until is None else until
        for j in range(after + 1, end):
            hit = self.m(node.constraint, j, theta)
            if hit is not None:
                self.found.append((ViolationKind.FORBIDDEN_EVENT, path, j, hit))
                return

    def eval(self, node, path: str, theta: Binding, after: int) -> Optional[tuple[int, Binding]]:
        """Completion ``(position, binding)`` of ``node`` entered after ``after``, or None."""
        if isinstance(node, Require):
            for j in range(after + 1, len(self.events)):
                hit = self.m(node.constraint, j, theta)
                if hit is not None:
                    return j, hit
            self.found.append((ViolationKind.MISSING_EVENT, path, None, theta))
            return None
        if isinstance(node, Forbid):
            self.forbid(node, path, theta, after, None)
            return after, theta
        if isinstance(node, Unordered):
            ends = []
            for i, child in enumerate(node.children):
                r = self.eval(child, child_path(path, i), theta, after)
                ends.append(None if r is None else r[0])
            if any(x is None for x in ends):
                return None
            return max(ends), theta
        assert isinstance(node, Ordered)
        cur, th = after, theta
        waiting: list[tuple[Forbid, str, Binding, int]] = []
        for i, child in enumerate(node.children):
            cpath = child_path(path, i)
            if isinstance(child, Forbid):
                waiting.append((child, cpath, th, cur))
                continue
            r = self.eval(child, cpath, th, cur)
            for f, fpath, fth, fa in waiting:
                self.forbid(f, fpath, fth, fa, None if r is None else r[0])
            waiting = []
            if r is None:
                return None
            cur, th = r
        for f, fpath, fth, fa in waiting:
            self.forbid(f, fpath, fth, fa, None)
        return cur, th


def oracle_check(
    spec: Spec,
    log: Log | Sequence[Event],
    predicates: PredicateRegistry | Mapping[str, Callable] | None = None,
    *,
    max_events: int = DEFAULT_MAX_EVENTS,
    epsilon: float = 0.0,
) -> Report:
    events = list(log)
    if len(events) > max_events:
        raise LogTooLarge(len(events), max_events)
    report = Report(log.source_id if isinstance(log, Log) else "")
    for pattern in spec.patterns:
        res = PatternResult(pattern.name)
        for i, e in enumerate(events):
            theta = match(pattern.trigger, e, EMPTY, predicates, epsilon)
            if theta is None:
                continue
            res.triggers += 1
            ev = _Eval(pattern, events, predicates, epsilon)
            ev.eval(pattern.consequence, ROOT_PATH, theta, i)
            if not ev.found:
                res.satisfied += 1
            for kind, path, j, binding in ev.found:
                res.violations.append(
                    Violation(
                        pattern.name,
                        kind,
                        e.index,
                        binding,
                        path,
                        None if j is None else events[j].index,
                        f"{kind.value} at {path}",
                        e.time,
                        None if j is None else events[j].time,
                    )
                )
        res.violations.sort(key=Violation.sort_key)
        report.patterns.append(res)
    return report
