"""Evaluating an event constraint against one event under a binding."""

from __future__ import annotations

import inspect
import re
from functools import lru_cache
from typing import Callable, Iterator, Mapping, Optional

from .errors import ArityMismatch, PredicateFailure, UnknownPredicate
from .events import Event, Value, event_get, values_equal
from .speclang.ast import Bind, Compare, EventConstraint, Literal, PredicateCall, Regex, VarRef


class Binding(Mapping):
    """Immutable variable environment.

    ``extended`` returns a new binding; it never overwrites an existing
    variable with a different value.
    """

    __slots__ = ("_d",)

    def __init__(self, items: Mapping[str, Value] | None = None):
        self._d = dict(items or {})

    def __getitem__(self, k):
        return self._d[k]

    def __iter__(self) -> Iterator[str]:
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        return hash(frozenset(self._d.items()))

    def __repr__(self):
        return "Binding(" + ", ".join(f"{k}={v!r}" for k, v in sorted(self._d.items())) + ")"

    def extended(self, new: Mapping[str, Value]) -> "Binding":
        for k, v in new.items():
            if k in self._d and not values_equal(self._d[k], v):
                raise ValueError(f"variable {k!r} already bound to {self._d[k]!r}")
        b = Binding.__new__(Binding)
        b._d = {**self._d, **new}
        return b

    def as_dict(self) -> dict:
        return dict(sorted(self._d.items()))


EMPTY = Binding()


class PredicateRegistry:
    """Named user predicates.

    A predicate is called as ``fn(field_value, *args)`` where ``args`` are the
    literal or variable arguments written in the spec, and returns a truth
    value. ``arity`` counts the spec arguments only; when omitted it is
    inferred from the signature (``None`` means variadic).
    """

    def __init__(self, predicates: Mapping[str, Callable] | None = None):
        self._fns: dict[str, Callable] = {}
        self._arity: dict[str, Optional[int]] = {}
        for name, fn in (predicates or {}).items():
            self.register(name, fn)

    def register(self, name: str, fn: Callable, arity: int | None = -1) -> Callable:
        if arity == -1:
            arity = _infer_arity(fn)
        self._fns[name] = fn
        self._arity[name] = arity
        return fn

    def predicate(self, name: str | None = None, arity: int | None = -1):
        """Decorator form of ``register``."""

        def deco(fn):
            return self.register(name or fn.__name__, fn, arity)

        return deco

    def resolve(self, name: str, nargs: int) -> Callable:
        if name not in self._fns:
            raise UnknownPredicate(name)
        expected = self._arity[name]
        if expected is not None and expected != nargs:
            raise ArityMismatch(name, expected, nargs)
        return self._fns[name]

    def __contains__(self, name):
        return name in self._fns

    def names(self) -> list[str]:
        return sorted(self._fns)


def _infer_arity(fn: Callable) -> Optional[int]:
    try:
        params = list(inspect.signature(fn).parameters.values())
    except (TypeError, ValueError):
        return None
    if any(p.kind is p.VAR_POSITIONAL for p in params):
        return None
    positional = [p for p in params if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)]
    return max(len(positional) - 1, 0)


@lru_cache(maxsize=256)
def _regex(pattern: str) -> re.Pattern:
    return re.compile(pattern)


def _compare(op: str, actual: Value, expected: Value, epsilon: float) -> bool:
    if op == "!=":
        return not values_equal(actual, expected, epsilon)
    numeric = (int, float)
    if isinstance(actual, bool) or isinstance(expected, bool):
        return False
    if isinstance(actual, numeric) and isinstance(expected, numeric):
        pass
    elif not (isinstance(actual, str) and isinstance(expected, str)):
        return False
    if op == "<":
        return actual < expected
    if op == "<=":
        return actual <= expected
    if op == ">":
        return actual > expected
    return actual >= expected


def match(
    guard: EventConstraint,
    e: Event,
    theta: Binding = EMPTY,
    predicates: Mapping[str, Callable] | PredicateRegistry | None = None,
    epsilon: float = 0.0,
) -> Optional[Binding]:
    """Return the (possibly extended) binding if ``e`` satisfies ``guard``, else None.

    Variable and literal fields are checked first so predicate arguments may
    refer to variables bound by the same constraint. An absent field never
    matches. A predicate that raises surfaces as ``PredicateFailure``.
    """
    if e.kind is not guard.kind:
        return None
    new: dict[str, Value] = {}
    calls = []
    for fc in guard.fields:
        m = fc.matcher
        if isinstance(m, PredicateCall):
            calls.append(fc)
            continue
        actual = event_get(e, fc.name)
        if actual is None:
            return None
        if isinstance(m, Bind):
            if m.var in theta:
                bound = theta[m.var]
            elif m.var in new:
                bound = new[m.var]
            else:
                new[m.var] = actual
                continue
            if not values_equal(bound, actual, epsilon):
                return None
        elif isinstance(m, Literal):
            if not values_equal(m.value, actual, epsilon):
                return None
        elif isinstance(m, Compare):
            if not _compare(m.op, actual, m.value, epsilon):
                return None
        elif isinstance(m, Regex):
            if not isinstance(actual, str) or _regex(m.pattern).fullmatch(actual) is None:
                return None
    for fc in calls:
        actual = event_get(e, fc.name)
        if actual is None:
            return None
        m = fc.matcher
        args = [actual]
        for a in m.args:
            if isinstance(a, VarRef):
                args.append(theta[a.var] if a.var in theta else new[a.var])
            else:
                args.append(a.value)
        fn = _lookup(predicates, m.name, len(m.args))
        try:
            ok = fn(*args)
        except Exception as exc:
            raise PredicateFailure(m.name, exc) from exc
        if not ok:
            return None
    if not new:
        return theta
    return theta.extended(new)


def _lookup(predicates, name: str, nargs: int) -> Callable:
    if isinstance(predicates, PredicateRegistry):
        return predicates.resolve(name, nargs)
    if predicates is None or name not in predicates:
        raise UnknownPredicate(name)
    return predicates[name]
