"""Verdicts, violations and their text/JSON renderings."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional

from .matching import Binding
from .speclang.printer import format_value

VIOLATION_JSON_FIELDS = ("pattern", "kind", "trigger_index", "offending_index", "binding", "message")


class ViolationKind(str, enum.Enum):
    MISSING_EVENT = "MissingEvent"
    FORBIDDEN_EVENT = "ForbiddenEvent"


@dataclass(frozen=True)
class Violation:
    pattern: str
    kind: ViolationKind
    trigger_index: int
    binding: Binding
    obligation_origin: str
    offending_index: Optional[int] = None
    message: str = ""
    trigger_time: Optional[int] = None
    offending_time: Optional[int] = None

    def __post_init__(self):
        if (self.offending_index is not None) != (self.kind is ViolationKind.FORBIDDEN_EVENT):
            raise ValueError("offending_index is set exactly for ForbiddenEvent violations")

    def triple(self) -> tuple[str, int, str]:
        return (self.pattern, self.trigger_index, self.kind.value)

    def sort_key(self):
        off = -1 if self.offending_index is None else self.offending_index
        return (self.trigger_index, off, self.obligation_origin, self.kind.value)

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "kind": self.kind.value,
            "trigger_index": self.trigger_index,
            "offending_index": self.offending_index,
            "binding": self.binding.as_dict(),
            "message": self.message,
        }


@dataclass
class PatternResult:
    name: str
    triggers: int = 0
    satisfied: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def violated(self) -> int:
        return self.triggers - self.satisfied


@dataclass
class Report:
    source_id: str
    patterns: list[PatternResult] = field(default_factory=list)

    @property
    def violations(self) -> list[Violation]:
        return [v for p in self.patterns for v in p.violations]

    @property
    def passed(self) -> bool:
        return not any(p.violations for p in self.patterns)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def triples(self) -> set[tuple[str, int, str]]:
        return {v.triple() for v in self.violations}

    def result(self, name: str) -> PatternResult:
        for p in self.patterns:
            if p.name == name:
                return p
        raise KeyError(name)

    def to_json(self, max_violations: int = 0) -> dict:
        vs = self.violations
        shown = vs if max_violations <= 0 else vs[:max_violations]
        return {
            "source_id": self.source_id,
            "verdict": self.verdict,
            "counts": {
                "patterns": len(self.patterns),
                "triggers": sum(p.triggers for p in self.patterns),
                "satisfied": sum(p.satisfied for p in self.patterns),
                "violated": sum(p.violated for p in self.patterns),
                "violations": len(vs),
            },
            "patterns": [
                {
                    "name": p.name,
                    "triggers": p.triggers,
                    "satisfied": p.satisfied,
                    "violated": p.violated,
                    "violations": len(p.violations),
                }
                for p in self.patterns
            ],
            "violations": [v.to_json() for v in shown],
        }

    def dumps(self, max_violations: int = 0) -> str:
        return json.dumps(self.to_json(max_violations), ensure_ascii=False, separators=(",", ":"))


def _fmt_binding(b: Binding) -> str:
    if not b:
        return "(none)"
    return ", ".join(f"{k}={format_value(v)}" for k, v in sorted(b.items()))


def _ref(source: str, index: Optional[int], time: Optional[int]) -> str:
    where = f"{source or '<log>'} event #{index}"
    return where if time is None else f"{where} (time {time})"


def render_text(report: Report, max_violations: int = 0) -> str:
    out = [f"log: {report.source_id or '<log>'}"]
    for p in report.patterns:
        out.append(f"pattern {p.name}: {p.triggers} triggered, {p.satisfied} satisfied, {p.violated} violated")
    vs = report.violations
    shown = vs if max_violations <= 0 else vs[:max_violations]
    for v in shown:
        out.append("")
        out.append(f"[{v.kind.value}] {v.pattern} at {v.obligation_origin}")
        out.append(f"  {v.message}")
        out.append(f"  trigger:   {_ref(report.source_id, v.trigger_index, v.trigger_time)}")
        if v.offending_index is not None:
            out.append(f"  offending: {_ref(report.source_id, v.offending_index, v.offending_time)}")
        out.append(f"  binding:   {_fmt_binding(v.binding)}")
    if len(shown) < len(vs):
        out.append("")
        out.append(f"... {len(vs) - len(shown)} more violation(s) not shown")
    out.append("")
    n = len(vs)
    out.append(f"verdict: {report.verdict}" + (f" ({n} violation{'s' if n != 1 else ''})" if n else ""))
    return "\n".join(out) + "\n"
