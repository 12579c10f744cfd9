"""Syntax tree for pattern specifications.

All nodes are frozen and compare structurally. Literal values compare with
their type, so ``1``, ``1.0`` and ``true`` are three different literals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from ..events import EventKind, Value, value_key

COMPARE_OPS = ("<", "<=", ">", ">=", "!=")


def _typed(v: Value) -> tuple:
    return (type(v).__name__, value_key(v))


@dataclass(frozen=True, eq=False)
class Literal:
    value: Value

    def __eq__(self, other):
        return isinstance(other, Literal) and _typed(self.value) == _typed(other.value)

    def __hash__(self):
        return hash(("lit", _typed(self.value)))


@dataclass(frozen=True)
class Bind:
    """Bare variable: binds on first occurrence, equality check afterwards."""

    var: str


@dataclass(frozen=True, eq=False)
class Compare:
    op: str
    value: Value

    def __eq__(self, other):
        return isinstance(other, Compare) and self.op == other.op and _typed(self.value) == _typed(other.value)

    def __hash__(self):
        return hash(("cmp", self.op, _typed(self.value)))


@dataclass(frozen=True)
class Regex:
    pattern: str


@dataclass(frozen=True)
class VarRef:
    var: str


@dataclass(frozen=True)
class PredicateCall:
    name: str
    args: tuple[Union[Literal, VarRef], ...] = ()


Matcher = Union[Literal, Bind, Compare, Regex, PredicateCall]


@dataclass(frozen=True)
class FieldConstraint:
    name: str
    matcher: Matcher


@dataclass(frozen=True)
class EventConstraint:
    kind: EventKind
    fields: tuple[FieldConstraint, ...] = ()

    def binders(self) -> list[str]:
        return [fc.matcher.var for fc in self.fields if isinstance(fc.matcher, Bind)]


@dataclass(frozen=True)
class Require:
    constraint: EventConstraint


@dataclass(frozen=True)
class Forbid:
    constraint: EventConstraint


@dataclass(frozen=True)
class Ordered:
    children: tuple["Node", ...]


@dataclass(frozen=True)
class Unordered:
    children: tuple["Node", ...]


Node = Union[Require, Forbid, Ordered, Unordered]
Leaf = (Require, Forbid)


@dataclass(frozen=True)
class Pattern:
    name: str
    trigger: EventConstraint
    consequence: Node


@dataclass(frozen=True)
class Spec:
    patterns: tuple[Pattern, ...] = ()

    def __iter__(self) -> Iterator[Pattern]:
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def pattern(self, name: str) -> Pattern:
        for p in self.patterns:
            if p.name == name:
                return p
        raise KeyError(name)


ROOT_PATH = "C"


def child_path(path: str, i: int) -> str:
    return f"{path}.{i}"


def walk(node: Node, path: str = ROOT_PATH) -> Iterator[tuple[str, Node]]:
    """Pre-order traversal yielding ``(path, node)``; the root is ``"C"``."""
    yield path, node
    if isinstance(node, (Ordered, Unordered)):
        for i, child in enumerate(node.children):
            yield from walk(child, child_path(path, i))


def leaves(node: Node, path: str = ROOT_PATH) -> Iterator[tuple[str, Node]]:
    for p, n in walk(node, path):
        if isinstance(n, Leaf):
            yield p, n


def depth(node: Node) -> int:
    if isinstance(node, (Ordered, Unordered)):
        return 1 + max(depth(c) for c in node.children)
    return 0
