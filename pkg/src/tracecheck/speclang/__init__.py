from .ast import (
    Bind,
    Compare,
    EventConstraint,
    FieldConstraint,
    Forbid,
    Literal,
    Ordered,
    Pattern,
    PredicateCall,
    Regex,
    Require,
    Spec,
    Unordered,
    VarRef,
)
from .binding import check_bindings
from .parser import parse_spec, tokenize
from .printer import format_constraint, format_node, pretty_print

__all__ = [
    "Bind",
    "Compare",
    "EventConstraint",
    "FieldConstraint",
    "Forbid",
    "Literal",
    "Ordered",
    "Pattern",
    "PredicateCall",
    "Regex",
    "Require",
    "Spec",
    "Unordered",
    "VarRef",
    "check_bindings",
    "format_constraint",
    "format_node",
    "parse_spec",
    "pretty_print",
    "tokenize",
]
