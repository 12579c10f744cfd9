"""Random generators for specs, logs and ASTs shared by property and acceptance tests."""

from __future__ import annotations

import random
import string

from hypothesis import strategies as st

from tracecheck.errors import UnboundVariable
from tracecheck.events import RAW_KINDS, Event, EventKind, make_log
from tracecheck.speclang.ast import (
    COMPARE_OPS,
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
from tracecheck.speclang.binding import check_bindings

# -- small-vocabulary specs and logs, tuned so matches are frequent ----------

FIELDS = ("A", "B", "N")
VALUES = {"A": ("a", "b"), "B": ("a", "b"), "N": (1, 2)}
KINDS = (EventKind.COMMAND, EventKind.EVR, EventKind.CHANGE)


def random_constraint(rng: random.Random, bound: list[str], fresh: list[str]) -> EventConstraint:
    kind = rng.choice(KINDS)
    fields = []
    for name in rng.sample(FIELDS, rng.randint(0, 2)):
        r = rng.random()
        if r < 0.45:
            m = Literal(rng.choice(VALUES[name]))
        elif r < 0.75 and bound:
            m = Bind(rng.choice(bound))
        elif r < 0.85:
            m = Bind(rng.choice(fresh))
        elif name == "N":
            m = Compare(rng.choice(COMPARE_OPS), rng.choice((1, 2)))
        else:
            m = Regex(rng.choice(("a", "[ab]", "b|c")))
        fields.append(FieldConstraint(name, m))
    return EventConstraint(kind, tuple(fields))


def random_node(rng: random.Random, depth: int, bound: list[str]):
    if depth == 0 or rng.random() < 0.45:
        c = random_constraint(rng, bound, ["u", "v"])
        return Forbid(c) if rng.random() < 0.35 else Require(c)
    n = rng.randint(1, 3)
    kids = tuple(random_node(rng, depth - 1, bound) for _ in range(n))
    return Ordered(kids) if rng.random() < 0.55 else Unordered(kids)


def random_pattern(rng: random.Random, name: str, max_depth: int = 3) -> Pattern:
    while True:
        trig = random_constraint(rng, [], ["x", "y"])
        bound = trig.binders()
        p = Pattern(name, trig, random_node(rng, max_depth, bound))
        try:
            check_bindings(p)
        except UnboundVariable:
            continue
        return p


def random_spec(rng: random.Random, max_patterns: int = 2, max_depth: int = 3) -> Spec:
    n = rng.randint(1, max_patterns)
    return Spec(tuple(random_pattern(rng, f"P{i}", max_depth) for i in range(n)))


def random_events(rng: random.Random, max_len: int = 32) -> list[Event]:
    out = []
    t = 0
    for _ in range(rng.randint(0, max_len)):
        t += rng.randint(0, 3)
        fields = {}
        for name in FIELDS:
            if rng.random() < 0.75:
                fields[name] = rng.choice(VALUES[name])
        out.append(Event(rng.choice(KINDS), t, -1, fields))
    return out


def random_log(rng: random.Random, max_len: int = 32, source_id: str = "random"):
    return make_log(random_events(rng, max_len), source_id)


# -- hypothesis strategies for whole-grammar ASTs ----------------------------

_ident_tail = string.ascii_letters + string.digits + "_"
field_names = st.builds(
    lambda h, t: h + t,
    st.sampled_from(string.ascii_letters + "_"),
    st.text(alphabet=_ident_tail + ".", max_size=6),
)
var_names = st.builds(
    lambda h, t: h + t,
    st.sampled_from(string.ascii_lowercase),
    st.text(alphabet=string.ascii_lowercase + string.digits + "_", max_size=4),
).filter(lambda s: s not in {"pattern", "not", "matches", "true", "false"})
pattern_names = st.builds(
    lambda h, t: h + t, st.sampled_from(string.ascii_uppercase), st.text(alphabet=_ident_tail, max_size=8)
)
text_values = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), max_codepoint=0x2FF) | st.sampled_from('"\\\n\t'),
    max_size=8,
)
values = st.one_of(
    text_values,
    st.integers(min_value=-(10**12), max_value=10**12),
    st.floats(allow_nan=False, allow_infinity=False),
    st.booleans(),
)
literals = values.map(Literal)


@st.composite
def matchers(draw, bound):
    choice = draw(st.integers(0, 4))
    if choice == 0:
        return draw(literals)
    if choice == 1:
        return Bind(draw(st.sampled_from(bound)) if bound else draw(var_names))
    if choice == 2:
        return Compare(draw(st.sampled_from(COMPARE_OPS)), draw(values))
    if choice == 3:
        return Regex(draw(st.sampled_from(["a.*", "\\d+", "[A-Z]{2}", 'x"y', "a\\\\b"])))
    args = draw(st.lists(st.one_of(literals, st.sampled_from(bound).map(VarRef)) if bound else literals, max_size=3))
    return PredicateCall(draw(st.sampled_from(["ok", "starts_with", "inRange"])), tuple(args))


@st.composite
def constraints(draw, bound):
    names = draw(st.lists(field_names, max_size=3, unique=True))
    fields = tuple(FieldConstraint(n, draw(matchers(bound))) for n in names)
    return EventConstraint(draw(st.sampled_from(RAW_KINDS)), fields)


@st.composite
def nodes(draw, bound, depth):
    if depth == 0 or draw(st.booleans()):
        c = draw(constraints(bound))
        return Forbid(c) if draw(st.booleans()) else Require(c)
    kids = tuple(draw(st.lists(nodes(bound, depth - 1), min_size=1, max_size=3)))
    return Ordered(kids) if draw(st.booleans()) else Unordered(kids)


@st.composite
def patterns(draw, name=None):
    bound = draw(st.lists(var_names, max_size=3, unique=True))
    trig_fields = [FieldConstraint(f"t{i}", Bind(v)) for i, v in enumerate(bound)]
    extra = draw(constraints(bound))
    trig = EventConstraint(extra.kind, tuple(trig_fields) + tuple(fc for fc in extra.fields if fc.name[0] != "t"))
    p = Pattern(name or draw(pattern_names), trig, draw(nodes(bound, 3)))
    # fresh variables only arise from var_names when nothing is bound; keep valid trees
    try:
        check_bindings(p)
    except UnboundVariable:
        p = Pattern(p.name, trig, Require(EventConstraint(EventKind.EVR, ())))
    return p


@st.composite
def specs(draw):
    names = draw(st.lists(pattern_names, max_size=3, unique=True))
    return Spec(tuple(draw(patterns(n)) for n in names))
