import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracecheck.events import Event, EventKind, Log, event_equal_under, event_get, make_log, values_equal

from conftest import E


def test_event_get_field():
    assert event_get(E("EVR", Stem="PICT"), "Stem") == "PICT"


def test_event_get_reserved_names():
    e = Event(EventKind.EVR, 42, 3, {"Stem": "PICT"})
    assert event_get(e, "kind") == "EVR"
    assert event_get(e, "time") == 42
    assert event_get(e, "index") == 3


def test_event_get_absent():
    assert event_get(E("EVR", Number=7), "Stem") is None


def test_equal_under_ignores_unlisted_time():
    a = Event(EventKind.EVR, 10, fields={"Dispatch": "PICT"})
    b = Event(EventKind.EVR, 99, fields={"Dispatch": "PICT"})
    assert event_equal_under(a, b, ["Dispatch"])


def test_equal_under_empty_projection_needs_same_kind():
    a = E("EVR", 1, X=1)
    assert event_equal_under(a, a, [])
    assert not event_equal_under(E("COMMAND", X=1), E("EVR", X=1), [])
    assert not event_equal_under(E("COMMAND", X=1), E("EVR", X=1), ["X"])


def test_equal_under_both_absent_counts_equal():
    assert event_equal_under(E("EVR", A=1), E("EVR", B=2), ["C"])
    assert not event_equal_under(E("EVR", A=1), E("EVR", B=2), ["A"])


def test_values_equal_is_type_aware():
    assert not values_equal(True, 1)
    assert not values_equal("1", 1)
    assert values_equal(7, 7.0)
    assert not values_equal(1.0, 1.05)
    assert values_equal(1.0, 1.05, epsilon=0.1)


@pytest.mark.parametrize("name", ["kind", "time", "index", ""])
def test_reserved_or_empty_field_names_rejected(name):
    with pytest.raises(ValueError):
        Event(EventKind.EVR, 0, fields={name: 1})


def test_rejects_nested_and_nonfinite_values():
    with pytest.raises(TypeError):
        Event(EventKind.EVR, 0, fields={"a": [1]})
    with pytest.raises(TypeError):
        Event(EventKind.EVR, 0, fields={"a": float("nan")})
    with pytest.raises(TypeError):
        Event(EventKind.EVR, 1.5)


def test_events_are_immutable():
    e = E("EVR", A=1)
    with pytest.raises(TypeError):
        e.fields["A"] = 2


def test_log_invariants():
    log = make_log([E("EVR", 1), E("EVR", 1), E("EVR", 3)])
    assert [e.index for e in log] == [0, 1, 2]
    assert log.time_ties() == [(0, 1)]
    with pytest.raises(ValueError):
        Log((Event(EventKind.EVR, 5, 0), Event(EventKind.EVR, 4, 1)))
    with pytest.raises(ValueError):
        Log((Event(EventKind.EVR, 5, 1),))


def test_exactly_six_kinds():
    assert [k.value for k in EventKind] == ["COMMAND", "PRODUCT", "CHANNEL", "CHANGE", "EVR", "META"]


small_values = st.one_of(st.sampled_from(["a", "b"]), st.integers(0, 2), st.booleans())
events = st.builds(
    lambda k, f: Event(k, 0, -1, f),
    st.sampled_from([EventKind.EVR, EventKind.COMMAND]),
    st.dictionaries(st.sampled_from(["A", "B", "C"]), small_values, max_size=3),
)
field_lists = st.lists(st.sampled_from(["A", "B", "C", "kind"]), max_size=3)


@given(events, events, events, field_lists)
def test_equal_under_is_an_equivalence(a, b, c, fields):
    assert event_equal_under(a, a, fields)
    assert event_equal_under(a, b, fields) == event_equal_under(b, a, fields)
    if event_equal_under(a, b, fields) and event_equal_under(b, c, fields):
        assert event_equal_under(a, c, fields)
