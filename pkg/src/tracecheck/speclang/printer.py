"""Canonical text rendering of a ``Spec``; the parser reads it back unchanged."""

from __future__ import annotations

from .ast import (
    Bind,
    Compare,
    EventConstraint,
    Forbid,
    Literal,
    Ordered,
    PredicateCall,
    Regex,
    Require,
    Spec,
    Unordered,
    VarRef,
)

INDENT = "  "


def quote(s: str) -> str:
    s = s.replace("\\", "\\\\").replace('"', '\\"')
    return '"' + s.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r") + '"'


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return quote(v)
    if isinstance(v, float):
        return repr(v)  # shortest text that reads back as the same float
    return str(v)


def format_matcher(m) -> str:
    if isinstance(m, Literal):
        return format_value(m.value)
    if isinstance(m, Bind):
        return m.var
    if isinstance(m, Compare):
        return f"{m.op} {format_value(m.value)}"
    if isinstance(m, Regex):
        return f"matches {quote(m.pattern)}"
    if isinstance(m, PredicateCall):
        args = ", ".join(a.var if isinstance(a, VarRef) else format_value(a.value) for a in m.args)
        return f"{m.name}({args})"
    raise TypeError(f"not a matcher: {m!r}")


def format_constraint(c: EventConstraint) -> str:
    inner = ", ".join(f"{fc.name}: {format_matcher(fc.matcher)}" for fc in c.fields)
    return f"{c.kind.value}{{{inner}}}"


def _node_lines(node, level: int) -> list[str]:
    pad = INDENT * level
    if isinstance(node, Require):
        return [pad + format_constraint(node.constraint)]
    if isinstance(node, Forbid):
        return [pad + "not " + format_constraint(node.constraint)]
    opening, closing = ("[", "]") if isinstance(node, Ordered) else ("{", "}")
    lines = [pad + opening]
    for i, child in enumerate(node.children):
        child_lines = _node_lines(child, level + 1)
        if i < len(node.children) - 1:
            child_lines[-1] += ","
        lines.extend(child_lines)
    lines.append(pad + closing)
    return lines


def format_node(node, level: int = 0) -> str:
    return "\n".join(_node_lines(node, level))


def pretty_print(spec: Spec) -> str:
    blocks = []
    for p in spec.patterns:
        head = [f"pattern {p.name}:", f"{INDENT}{format_constraint(p.trigger)} =>"]
        blocks.append("\n".join(head + _node_lines(p.consequence, 2)) + "\n")
    return "\n".join(blocks)
