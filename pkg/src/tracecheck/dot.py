"""Graphviz DOT export for compiled automata."""

from __future__ import annotations

from .compiler import Automaton, StateKind
from .speclang.printer import format_constraint

_STYLE = {
    StateKind.ALWAYS: 'shape=doublecircle',
    StateKind.HOT: 'shape=circle, style=filled, fillcolor="#f4a582"',
    StateKind.WATCH: 'shape=circle, style=dashed',
}


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def to_dot(a: Automaton) -> str:
    """Render ``a`` as a DOT digraph; node and edge order are sorted by state id."""
    lines = [f"digraph {_q(a.pattern_name)} {{", "  rankdir=LR;", '  node [fontname="Helvetica"];']
    for sid in sorted(a.states):
        st = a.states[sid]
        label = f"{st.kind.value} {st.origin}\n"
        if st.kind is StateKind.WATCH:
            label += "not "
        label += format_constraint(st.guard)
        if st.closed_by is not None:
            label += f"\nuntil {st.closed_by} completes"
        lines.append(f"  {_q(sid)} [label={_q(label)}, {_STYLE[st.kind]}];")
    for sid in sorted(a.states):
        st = a.states[sid]
        for target in sorted(st.on_match):
            lines.append(f"  {_q(sid)} -> {_q(target)} [label={_q(format_constraint(st.guard))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
