import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracecheck.errors import EmptyInput, ModelFormatError
from tracecheck.events import EventKind, make_log
from tracecheck.learner import (
    ABSENT,
    END,
    AbstractEvent,
    EqualityConfig,
    LearnedModel,
    diff,
    endorse,
    learn,
    project,
)
from tracecheck.logmaker import finalize

from conftest import E
from gen import KINDS, random_log

EVR = EventKind.EVR
DISPATCH = EqualityConfig({EVR: ("Dispatch",)}, frozenset({EVR}))


def evrs(*stems, source="log"):
    return make_log([E("EVR", i, Dispatch=s) for i, s in enumerate(stems)], source)


def test_projection_example():
    log = make_log([E("EVR", 0, Dispatch="A"), E("CHANNEL", 1, Temp=3), E("EVR", 2, Dispatch="B")])
    assert project(log, DISPATCH) == (AbstractEvent(EVR, (("Dispatch", "A"),)), AbstractEvent(EVR, (("Dispatch", "B"),)))


def test_projection_keeps_config_order_and_marks_absent():
    cfg = EqualityConfig({EVR: ("B", "A")})
    [a] = project(make_log([E("EVR", A=1)]), cfg)
    assert a.projection == (("B", ABSENT), ("A", 1))
    assert a != AbstractEvent(EVR, (("B", ""), ("A", 1)))


def test_empty_field_list_collapses_to_kind():
    cfg = EqualityConfig()
    log = make_log([E("EVR", A=1), E("EVR", A=2), E("COMMAND")])
    assert project(log, cfg) == (AbstractEvent(EVR), AbstractEvent(EVR), AbstractEvent(EventKind.COMMAND))


def test_meta_only_log_projects_to_empty():
    assert project(finalize([]), EqualityConfig()) == ()
    with pytest.raises(ModelFormatError):
        EqualityConfig(include_kinds=frozenset({EventKind.META}))


def test_learn_collapses_duplicates():
    assert len(learn([evrs("A", "B"), evrs("A", "B", source="other")], DISPATCH).traces) == 1
    model = learn([evrs("A", "B"), evrs("A", "C")], DISPATCH)
    assert len(model.traces) == 2
    assert model.provenance == ("log", "log") and not model.endorsed
    with pytest.raises(EmptyInput):
        learn([], DISPATCH)


def test_diff_substitution():
    d = diff(learn([evrs("A", "B", "C")], DISPATCH), evrs("A", "X", "C"))
    assert (d.match, d.divergence, d.log_index) == (False, 1, 1)
    assert d.expected == AbstractEvent(EVR, (("Dispatch", "B"),))
    assert d.observed == AbstractEvent(EVR, (("Dispatch", "X"),))


def test_diff_longer_log():
    d = diff(learn([evrs("A", "B", "C")], DISPATCH), evrs("A", "B", "C", "D"))
    assert (d.divergence, d.expected, d.log_index) == (3, END, 3)
    assert d.observed == AbstractEvent(EVR, (("Dispatch", "D"),))


def test_diff_shorter_log():
    d = diff(learn([evrs("A", "B", "C")], DISPATCH), evrs("A", "B"))
    assert (d.divergence, d.observed, d.log_index) == (2, END, None)


def test_closest_trace_tie_breaks():
    model = learn([evrs("A", "B", "Q", "R"), evrs("A", "B", "Z"), evrs("A", "Y")], DISPATCH)
    d = diff(model, evrs("A", "B", "C"))
    # both A,B,* traces share a prefix of 2; the shorter one wins
    assert model.traces[d.closest] == project(evrs("A", "B", "Z"), DISPATCH)
    model = learn([evrs("A", "B", "Z"), evrs("A", "B", "Q")], DISPATCH)
    d = diff(model, evrs("A", "B", "C"))
    assert d.expected == AbstractEvent(EVR, (("Dispatch", "Q"),))


def test_log_index_skips_dropped_events():
    log = make_log([E("CHANNEL"), E("EVR", Dispatch="A"), E("CHANNEL"), E("EVR", Dispatch="X")])
    d = diff(learn([evrs("A", "B")], DISPATCH), log)
    assert (d.divergence, d.log_index) == (1, 3)


def test_endorse():
    model = learn([evrs("A")], DISPATCH)
    e = endorse(model)
    assert e.endorsed and e.traces == model.traces
    assert endorse(e) == e
    assert diff(e, evrs("A")).endorsed


def test_hand_edited_model():
    model = endorse(learn([evrs("A", "B")], DISPATCH))
    doc = json.loads(model.dumps())
    doc["traces"].append([["EVR", [["Dispatch", "A"]]], ["EVR", [["Dispatch", None]]]])
    edited = LearnedModel.loads(json.dumps(doc))
    assert len(edited.traces) == 2
    assert diff(edited, make_log([E("EVR", Dispatch="A"), E("EVR", Other=1)])).match


def test_model_file_layout():
    doc = json.loads(learn([evrs("A")], DISPATCH).dumps())
    assert list(doc) == ["config", "endorsed", "provenance", "traces"]
    assert doc["traces"] == [[["EVR", [["Dispatch", "A"]]]]]
    assert doc["config"] == {"fields": {"EVR": ["Dispatch"]}, "include_kinds": ["EVR"]}


@pytest.mark.parametrize(
    "text",
    ["", "[]", "{}", '{"config": {}, "endorsed": "yes", "provenance": [], "traces": []}',
     '{"config": {}, "endorsed": true, "provenance": [], "traces": [[["NOPE", []]]]}',
     '{"config": {"include_kinds": []}, "endorsed": true, "provenance": [], "traces": []}'],
)
def test_bad_model(text):
    with pytest.raises(ModelFormatError):
        LearnedModel.loads(text)


ALL_FIELDS = EqualityConfig({k: ("A", "N") for k in KINDS})
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(seeds)
def test_self_acceptance_and_round_trip(seed):
    rng = random.Random(seed)
    logs = [random_log(rng) for _ in range(rng.randint(1, 3))]
    model = learn(logs, ALL_FIELDS)
    assert all(diff(model, log).match for log in logs)
    text = model.dumps()
    again = LearnedModel.loads(text)
    assert again == model and again.dumps() == text


@given(seeds)
def test_perturbation_is_located(seed):
    rng = random.Random(seed)
    log = random_log(rng, max_len=32)
    if not len(log):
        return
    model = learn([log], ALL_FIELDS)
    k = rng.randrange(len(log))
    events = list(log)
    events[k] = E(events[k].kind.value, events[k].time, A="perturbed")
    d = diff(model, make_log(events))
    assert (d.match, d.divergence, d.log_index) == (False, k, k)


@given(seeds)
def test_more_logs_never_break_a_match(seed):
    rng = random.Random(seed)
    a, b, probe = random_log(rng, 6), random_log(rng, 6), random_log(rng, 6)
    if diff(learn([a], ALL_FIELDS), probe).match:
        assert diff(learn([a, b], ALL_FIELDS), probe).match
