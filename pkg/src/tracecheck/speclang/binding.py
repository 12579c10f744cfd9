"""Variable binding discipline for patterns.

Trigger variables are bound by the trigger match. In the consequence, a bare
variable not yet in scope is a binder, and it must be referenced again
afterwards: later in the same constraint, or, for a requirement inside an
ordered scope, by a later sibling (or anything nested in one). A binder that
is never referenced again is reported as ``UnboundVariable`` since the name
cannot refer to anything bound earlier. Bindings made inside an unordered
scope never leak to its siblings or past the scope.
"""

from __future__ import annotations

from ..errors import UnboundVariable
from .ast import Bind, EventConstraint, Forbid, Ordered, Pattern, PredicateCall, Require, Unordered, VarRef


class _Binder:
    __slots__ = ("var", "uses")

    def __init__(self, var: str):
        self.var = var
        self.uses = 0


def _constraint(pattern: str, c: EventConstraint, env: dict, created: list) -> dict:
    local: dict = {}
    for fc in c.fields:
        m = fc.matcher
        if isinstance(m, Bind):
            if m.var in env:
                if env[m.var] is not None:
                    env[m.var].uses += 1
            elif m.var in local:
                local[m.var].uses += 1
            else:
                local[m.var] = _Binder(m.var)
                created.append(local[m.var])
    for fc in c.fields:
        m = fc.matcher
        if isinstance(m, PredicateCall):
            for a in m.args:
                if not isinstance(a, VarRef):
                    continue
                if a.var in env:
                    if env[a.var] is not None:
                        env[a.var].uses += 1
                elif a.var in local:
                    local[a.var].uses += 1
                else:
                    raise UnboundVariable(pattern, a.var)
    return local


def _walk(pattern: str, node, env: dict, created: list) -> dict:
    if isinstance(node, Require):
        local = _constraint(pattern, node.constraint, env, created)
        return {**env, **local}
    if isinstance(node, Forbid):
        _constraint(pattern, node.constraint, env, created)
        return env
    if isinstance(node, Ordered):
        for child in node.children:
            env = _walk(pattern, child, env, created)
        return env
    if isinstance(node, Unordered):
        for child in node.children:
            _walk(pattern, child, env, created)
        return env
    raise TypeError(f"not a consequence node: {node!r}")


def check_bindings(pattern: Pattern) -> None:
    """Raise ``UnboundVariable`` if the pattern violates the binding discipline."""
    trigger_vars = set(pattern.trigger.binders())
    for fc in pattern.trigger.fields:
        if isinstance(fc.matcher, PredicateCall):
            for a in fc.matcher.args:
                if isinstance(a, VarRef) and a.var not in trigger_vars:
                    raise UnboundVariable(pattern.name, a.var)
    # trigger variables carry no usage obligation (None marker)
    env = {v: None for v in trigger_vars}
    created: list[_Binder] = []
    _walk(pattern.name, pattern.consequence, env, created)
    for b in created:
        if b.uses == 0:
            raise UnboundVariable(pattern.name, b.var)
