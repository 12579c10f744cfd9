"""Turn raw structured records into a finalized, time-ordered log.

Raw input is JSON-lines (one object per line) or CSV with a header row. Each
record becomes an ``Event``: the kind is resolved through an alias table,
the timestamp is converted to integer microseconds and every other key is
flattened into the field map (nested objects as ``a.b``, lists as ``a.0``).
``finalize`` sorts stably by time, numbers the events and brackets them
with ``LOG_BEGIN``/``LOG_END`` meta-events.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation, ROUND_HALF_EVEN
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConfigError,
    InsufficientAnchors,
    InvalidAnchors,
    MalformedLine,
    MissingTime,
    UnknownKind,
)
from .events import RAW_KINDS, Event, EventKind, Log, Value

META_FIELD = "meta"
LOG_BEGIN = "LOG_BEGIN"
LOG_END = "LOG_END"

_UNIT_SCALE = {"s": 1_000_000, "ms": 1_000, "us": 1}


@dataclass(frozen=True)
class IngestConfig:
    kind_field: str = "kind"
    time_field: str = "time"
    kind_aliases: Mapping[str, EventKind] = field(default_factory=dict)
    time_unit: str = "us"

    def __post_init__(self):
        if self.kind_field == self.time_field:
            raise ConfigError("kind_field and time_field must differ")
        if self.time_unit not in _UNIT_SCALE:
            raise ConfigError(f"time_unit must be one of s/ms/us, got {self.time_unit!r}")
        aliases = {}
        for name, kind in self.kind_aliases.items():
            try:
                kind = EventKind(kind)
            except ValueError:
                raise ConfigError(f"alias {name!r} maps to unknown kind {kind!r}") from None
            if kind is EventKind.META:
                raise ConfigError(f"alias {name!r} may not map to META")
            aliases[name] = kind
        object.__setattr__(self, "kind_aliases", aliases)

    @classmethod
    def from_json(cls, doc: Mapping) -> "IngestConfig":
        return cls(
            kind_field=doc.get("kind_field", "kind"),
            time_field=doc.get("time_field", "time"),
            kind_aliases=doc.get("kind_aliases", {}),
            time_unit=doc.get("time_unit", "us"),
        )


@dataclass(frozen=True)
class ClockAnchor:
    ground_time: int
    canonical_time: int


# -- ingestion ---------------------------------------------------------------


def _reject_constant(name):
    raise ValueError(f"non-finite number {name}")


def _flatten(prefix: str, value, out: dict, line_no: int):
    if isinstance(value, dict):
        for k, v in value.items():
            if not isinstance(k, str) or not k:
                raise MalformedLine(line_no, f"empty field name under {prefix!r}")
            _flatten(f"{prefix}.{k}", v, out, line_no)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}.{i}", v, out, line_no)
    elif value is None:
        return  # null reads as an absent field
    elif isinstance(value, (str, bool, int, float)):
        out[prefix] = value
    else:  # pragma: no cover - json never produces other types
        raise MalformedLine(line_no, f"unsupported value for {prefix!r}")


def to_micros(raw, unit: str, line_no: int = 0) -> int:
    """Convert a timestamp in ``unit`` to integer microseconds, ties to even."""
    if isinstance(raw, bool):
        raise MalformedLine(line_no, f"time must be numeric, got {raw!r}")
    if isinstance(raw, int):
        return raw * _UNIT_SCALE[unit]
    try:
        d = Decimal(repr(raw) if isinstance(raw, float) else str(raw).strip())
    except InvalidOperation:
        raise MalformedLine(line_no, f"time must be numeric, got {raw!r}") from None
    if not d.is_finite():
        raise MalformedLine(line_no, f"time must be finite, got {raw!r}")
    return int((d * _UNIT_SCALE[unit]).to_integral_value(rounding=ROUND_HALF_EVEN))


def resolve_kind(raw, cfg: IngestConfig, line_no: int, allow_meta: bool = False) -> EventKind:
    if isinstance(raw, str):
        if raw in cfg.kind_aliases:
            return cfg.kind_aliases[raw]
        if raw in EventKind.__members__:
            kind = EventKind[raw]
            if kind is not EventKind.META or allow_meta:
                return kind
    raise UnknownKind(line_no, raw)


def record_to_event(rec: Mapping, cfg: IngestConfig, line_no: int, allow_meta: bool = False) -> Event:
    if cfg.kind_field not in rec:
        raise UnknownKind(line_no, None)
    kind = resolve_kind(rec[cfg.kind_field], cfg, line_no, allow_meta)
    if rec.get(cfg.time_field) is None:
        raise MissingTime(line_no, cfg.time_field)
    time = to_micros(rec[cfg.time_field], cfg.time_unit, line_no)
    fields: dict[str, Value] = {}
    for k, v in rec.items():
        if k in (cfg.kind_field, cfg.time_field, "index"):
            continue
        if not isinstance(k, str) or not k:
            raise MalformedLine(line_no, "empty field name")
        if k in ("kind", "time"):
            raise MalformedLine(line_no, f"reserved name {k!r} used as a field")
        _flatten(k, v, fields, line_no)
    return Event(kind, time, -1, fields)


def ingest(stream: Iterable[str] | str, cfg: IngestConfig | None = None, *, allow_meta: bool = False) -> list[Event]:
    """Parse JSON-lines records into unsorted, unindexed events."""
    cfg = cfg or IngestConfig()
    if isinstance(stream, str):
        stream = stream.splitlines()
    events = []
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line, parse_constant=_reject_constant)
        except ValueError as exc:
            raise MalformedLine(line_no, f"invalid JSON ({exc})") from None
        if not isinstance(rec, dict):
            raise MalformedLine(line_no, "record is not a JSON object")
        events.append(record_to_event(rec, cfg, line_no, allow_meta))
    return events


def _csv_value(text: str) -> Value:
    low = text.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        f = float(text)
    except ValueError:
        return text
    return f if math.isfinite(f) else text


def ingest_csv(text: str, cfg: IngestConfig | None = None) -> list[Event]:
    """CSV adapter: header row names the fields; empty cells are absent."""
    cfg = cfg or IngestConfig()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return []
    events = []
    for row in reader:
        line_no = reader.line_num
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise MalformedLine(line_no, f"expected {len(header)} columns, got {len(row)}")
        rec = {}
        for name, cell in zip(header, row):
            if cell == "":
                continue
            rec[name] = cell if name == cfg.kind_field else _csv_value(cell)
        events.append(record_to_event(rec, cfg, line_no))
    return events


# -- clock reconciliation ----------------------------------------------------


def _check_anchors(anchors: Sequence[ClockAnchor]):
    if len(anchors) < 2:
        raise InsufficientAnchors(len(anchors))
    for a, b in zip(anchors, anchors[1:]):
        if b.ground_time <= a.ground_time:
            raise InvalidAnchors("anchor ground times must be strictly increasing")
        if b.canonical_time < a.canonical_time:
            raise InvalidAnchors("anchor canonical times must be nondecreasing")


def align_time(t: int, anchors: Sequence[ClockAnchor]) -> int:
    # segment k covers [g_k, g_{k+1}]; the first and last segments extrapolate
    k = 0
    while k < len(anchors) - 2 and t > anchors[k + 1].ground_time:
        k += 1
    a, b = anchors[k], anchors[k + 1]
    slope = Fraction(b.canonical_time - a.canonical_time, b.ground_time - a.ground_time)
    return round(a.canonical_time + slope * (t - a.ground_time))


def time_align(events: Sequence[Event], anchors: Sequence[ClockAnchor]) -> list[Event]:
    """Remap event times through piecewise-linear anchor interpolation."""
    anchors = list(anchors)
    _check_anchors(anchors)
    return [e.with_time(align_time(e.time, anchors)) for e in events]


def load_anchors(doc) -> list[ClockAnchor]:
    """Read anchors from ``[[g, c], ...]`` or ``{"anchors": [{"ground_time":.., "canonical_time":..}]}``."""
    if isinstance(doc, dict):
        doc = doc.get("anchors")
    if not isinstance(doc, list):
        raise ConfigError("anchor document must be a list or have an 'anchors' list")
    out = []
    for item in doc:
        if isinstance(item, dict):
            g, c = item.get("ground_time"), item.get("canonical_time")
        elif isinstance(item, list) and len(item) == 2:
            g, c = item
        else:
            raise ConfigError(f"bad anchor entry {item!r}")
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (g, c)):
            raise ConfigError(f"anchor times must be integer microseconds: {item!r}")
        out.append(ClockAnchor(g, c))
    return out


# -- finalization and canonical output ---------------------------------------


def meta_event(name: str, time: int) -> Event:
    return Event(EventKind.META, time, -1, {META_FIELD: name})


def finalize(events: Sequence[Event], source_id: str = "") -> Log:
    """Stable sort by time, bracket with meta-events, number from 0."""
    body = [e for e in sorted(events, key=lambda e: e.time) if e.kind is not EventKind.META]
    first = body[0].time if body else 0
    last = body[-1].time if body else 0
    ordered = [meta_event(LOG_BEGIN, first), *body, meta_event(LOG_END, last)]
    return Log(tuple(e.with_index(i) for i, e in enumerate(ordered)), source_id)


def event_record(e: Event) -> dict:
    rec = {"kind": e.kind.value, "time": e.time, "index": e.index}
    for k in sorted(e.fields):
        rec[k] = e.fields[k]
    return rec


def serialize(log: Log | Sequence[Event]) -> str:
    """Canonical JSON-lines: kind, time, index, then fields in name order."""
    events = log.events if isinstance(log, Log) else log
    return "".join(
        json.dumps(event_record(e), ensure_ascii=False, separators=(",", ":")) + "\n" for e in events
    )


def read_log(text: str, source_id: str = "") -> Log:
    """Load a finalized log written by ``serialize`` (meta-events allowed, order kept)."""
    events = ingest(text, IngestConfig(), allow_meta=True)
    return Log(tuple(e.with_index(i) for i, e in enumerate(events)), source_id)
