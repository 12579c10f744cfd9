"""Concrete trace learner: remember every abstracted run, diff new runs against them.

Events are abstracted by an equality configuration (which kinds to keep and
which fields to compare per kind). A model is the set of abstract traces of
the runs it was learned from; a new log matches if its abstract trace is in
the set. Otherwise the report points at the first divergence from the
closest stored trace (longest common prefix, then shorter trace, then the
canonical text order).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

from .errors import EmptyInput, ModelFormatError
from .events import RAW_KINDS, EventKind, Log, Value, event_get, is_value, value_key


class _Absent:
    """Projection value for a field the event does not carry."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ABSENT"

    def __reduce__(self):
        return (_Absent, ())


ABSENT = _Absent()


def _pkey(v) -> tuple:
    if v is ABSENT:
        return ("absent",)
    return (type(v).__name__, value_key(v))


@dataclass(frozen=True)
class EqualityConfig:
    fields: Mapping[EventKind, tuple[str, ...]] = field(default_factory=dict)
    include_kinds: frozenset = frozenset(RAW_KINDS)

    def __post_init__(self):
        fields = {}
        for k, names in self.fields.items():
            k = EventKind(k)
            names = tuple(names)
            for n in names:
                if not isinstance(n, str) or not n:
                    raise ModelFormatError(f"bad field name {n!r} for kind {k.value}")
            fields[k] = names
        kinds = frozenset(EventKind(k) for k in self.include_kinds) - {EventKind.META}
        if not kinds:
            raise ModelFormatError("include_kinds must name at least one non-META kind")
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "include_kinds", kinds)

    def fields_for(self, kind: EventKind) -> tuple[str, ...]:
        return self.fields.get(kind, ())

    def to_json(self) -> dict:
        return {
            "fields": {k.value: list(self.fields[k]) for k in sorted(self.fields, key=lambda k: k.value)},
            "include_kinds": sorted(k.value for k in self.include_kinds),
        }

    @classmethod
    def from_json(cls, doc) -> "EqualityConfig":
        if not isinstance(doc, dict):
            raise ModelFormatError("equality config must be a JSON object")
        try:
            fields = {EventKind(k): v for k, v in doc.get("fields", {}).items()}
            kinds = doc.get("include_kinds")
            kinds = RAW_KINDS if kinds is None else [EventKind(k) for k in kinds]
        except (ValueError, AttributeError, TypeError) as exc:
            raise ModelFormatError(f"bad equality config: {exc}") from None
        for k, v in fields.items():
            if not isinstance(v, list):
                raise ModelFormatError(f"fields for {k.value} must be a list")
        return cls(fields, frozenset(kinds))


@dataclass(frozen=True, eq=False)
class AbstractEvent:
    kind: EventKind
    projection: tuple[tuple[str, object], ...] = ()

    def key(self) -> tuple:
        return (self.kind.value, tuple((n, _pkey(v)) for n, v in self.projection))

    def __eq__(self, other):
        return isinstance(other, AbstractEvent) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_json(self) -> list:
        return [self.kind.value, [[n, None if v is ABSENT else v] for n, v in self.projection]]

    @classmethod
    def from_json(cls, doc) -> "AbstractEvent":
        try:
            kind_name, proj = doc
            kind = EventKind(kind_name)
            pairs = []
            for name, v in proj:
                if not isinstance(name, str) or not (v is None or is_value(v)):
                    raise ValueError(f"bad projection entry {[name, v]!r}")
                pairs.append((name, ABSENT if v is None else v))
        except (TypeError, ValueError) as exc:
            raise ModelFormatError(f"bad abstract event {doc!r}: {exc}") from None
        return cls(kind, tuple(pairs))

    def __str__(self):
        inner = ", ".join(f"{n}: {'ABSENT' if v is ABSENT else json.dumps(v)}" for n, v in self.projection)
        return f"{self.kind.value}{{{inner}}}"


Trace = tuple[AbstractEvent, ...]


def _trace_text(t: Trace) -> str:
    return json.dumps([a.to_json() for a in t], ensure_ascii=False, separators=(",", ":"))


def _canonical(traces) -> tuple[Trace, ...]:
    uniq = {tuple(a.key() for a in t): tuple(t) for t in traces}
    return tuple(sorted(uniq.values(), key=_trace_text))


@dataclass(frozen=True)
class LearnedModel:
    config: EqualityConfig
    traces: tuple[Trace, ...] = ()
    endorsed: bool = False
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "traces", _canonical(self.traces))
        object.__setattr__(self, "provenance", tuple(self.provenance))

    def __contains__(self, trace) -> bool:
        key = tuple(a.key() for a in trace)
        return any(tuple(a.key() for a in t) == key for t in self.traces)

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "endorsed": self.endorsed,
            "provenance": list(self.provenance),
            "traces": [[a.to_json() for a in t] for t in self.traces],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_json(cls, doc) -> "LearnedModel":
        if not isinstance(doc, dict):
            raise ModelFormatError("model must be a JSON object")
        missing = {"config", "endorsed", "provenance", "traces"} - doc.keys()
        if missing:
            raise ModelFormatError(f"model is missing {sorted(missing)}")
        if not isinstance(doc["endorsed"], bool):
            raise ModelFormatError("'endorsed' must be true or false")
        if not isinstance(doc["provenance"], list) or not all(isinstance(p, str) for p in doc["provenance"]):
            raise ModelFormatError("'provenance' must be a list of strings")
        if not isinstance(doc["traces"], list) or not all(isinstance(t, list) for t in doc["traces"]):
            raise ModelFormatError("'traces' must be a list of event lists")
        traces = [tuple(AbstractEvent.from_json(a) for a in t) for t in doc["traces"]]
        return cls(EqualityConfig.from_json(doc["config"]), traces, doc["endorsed"], doc["provenance"])

    @classmethod
    def loads(cls, text: str) -> "LearnedModel":
        try:
            doc = json.loads(text)
        except ValueError as exc:
            raise ModelFormatError(f"model is not valid JSON: {exc}") from None
        return cls.from_json(doc)


def project_event(e, cfg: EqualityConfig) -> AbstractEvent:
    names = cfg.fields_for(e.kind)
    proj = []
    for n in names:
        v = event_get(e, n)
        proj.append((n, ABSENT if v is None else v))
    return AbstractEvent(e.kind, tuple(proj))


def project_with_index(log: Log | Sequence, cfg: EqualityConfig) -> tuple[Trace, tuple[int, ...]]:
    abstract, origin = [], []
    for pos, e in enumerate(log):
        if e.kind is EventKind.META or e.kind not in cfg.include_kinds:
            continue
        abstract.append(project_event(e, cfg))
        origin.append(e.index if e.index >= 0 else pos)
    return tuple(abstract), tuple(origin)


def project(log: Log | Sequence, cfg: EqualityConfig) -> Trace:
    return project_with_index(log, cfg)[0]


def learn(logs: Sequence[Log], cfg: EqualityConfig) -> LearnedModel:
    if not logs:
        raise EmptyInput("learning needs at least one log")
    traces = [project(log, cfg) for log in logs]
    sources = [log.source_id if isinstance(log, Log) else "" for log in logs]
    return LearnedModel(cfg, traces, False, sources)


def endorse(model: LearnedModel) -> LearnedModel:
    return model if model.endorsed else replace(model, endorsed=True)


END = "END"


@dataclass(frozen=True)
class DiffReport:
    source_id: str
    match: bool
    endorsed: bool
    divergence: Optional[int] = None
    expected: AbstractEvent | str | None = None
    observed: AbstractEvent | str | None = None
    log_index: Optional[int] = None
    closest: Optional[int] = None  # position of the closest trace in model.traces

    @property
    def verdict(self) -> str:
        return "MATCH" if self.match else "MISMATCH"

    def to_json(self) -> dict:
        def side(x):
            return x.to_json() if isinstance(x, AbstractEvent) else x

        return {
            "source_id": self.source_id,
            "verdict": self.verdict,
            "endorsed": self.endorsed,
            "divergence": self.divergence,
            "expected": side(self.expected),
            "observed": side(self.observed),
            "log_index": self.log_index,
            "closest_trace": self.closest,
        }

    def render(self) -> str:
        head = f"{self.source_id or '<log>'}: {self.verdict}"
        if not self.endorsed:
            head += " (model not endorsed)"
        if self.match:
            return head + "\n"
        lines = [
            head,
            f"  closest learned trace: #{self.closest}",
            f"  first divergence at abstract position {self.divergence}",
            f"  expected: {self.expected}",
            f"  observed: {self.observed}"
            + (f" (log event #{self.log_index})" if self.log_index is not None else ""),
        ]
        return "\n".join(lines) + "\n"


def _common_prefix(a: Trace, b: Trace) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def diff(model: LearnedModel, log: Log | Sequence) -> DiffReport:
    trace, origin = project_with_index(log, model.config)
    source = log.source_id if isinstance(log, Log) else ""
    if trace in model:
        return DiffReport(source, True, model.endorsed)
    if not model.traces:
        best, best_i, cpl = (), None, 0
    else:
        # traces are stored in canonical order, so the first best wins the final tie-break
        best_i = min(
            range(len(model.traces)),
            key=lambda i: (-_common_prefix(trace, model.traces[i]), len(model.traces[i]), i),
        )
        best = model.traces[best_i]
        cpl = _common_prefix(trace, best)
    expected = best[cpl] if cpl < len(best) else END
    observed = trace[cpl] if cpl < len(trace) else END
    log_index = origin[cpl] if cpl < len(trace) else None
    return DiffReport(source, False, model.endorsed, cpl, expected, observed, log_index, best_i)
