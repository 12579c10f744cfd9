"""Offline runtime verification of structured event logs.

Typical use::

    from tracecheck import parse_spec, compile_spec, check, ingest, finalize

    spec = parse_spec(open("rules.lsc").read())
    log = finalize(ingest(open("run.jsonl")), "run.jsonl")
    report = check(compile_spec(spec), log)
"""

from .compiler import Automaton, AutoState, StateKind, compile_spec
from .dot import to_dot
from .events import Event, EventKind, Log, event_equal_under, event_get, make_log
from .learner import EqualityConfig, LearnedModel, diff, endorse, learn, project
from .logmaker import ClockAnchor, IngestConfig, finalize, ingest, ingest_csv, read_log, serialize, time_align
from .matching import Binding, PredicateRegistry, match
from .monitor import Session, check, new_session
from .oracle import oracle_check
from .report import Report, Violation, ViolationKind, render_text
from .speclang import parse_spec, pretty_print

__version__ = "0.1.0"

__all__ = [
    "Automaton",
    "AutoState",
    "Binding",
    "ClockAnchor",
    "EqualityConfig",
    "Event",
    "EventKind",
    "IngestConfig",
    "LearnedModel",
    "Log",
    "PredicateRegistry",
    "Report",
    "Session",
    "StateKind",
    "Violation",
    "ViolationKind",
    "check",
    "compile_spec",
    "diff",
    "endorse",
    "event_equal_under",
    "event_get",
    "finalize",
    "ingest",
    "ingest_csv",
    "learn",
    "make_log",
    "match",
    "new_session",
    "oracle_check",
    "parse_spec",
    "pretty_print",
    "project",
    "read_log",
    "render_text",
    "serialize",
    "time_align",
    "to_dot",
]
