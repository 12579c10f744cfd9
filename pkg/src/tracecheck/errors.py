"""Exception hierarchy.

Everything the toolkit raises on bad input derives from ``TraceCheckError`` so
the command line can map it to exit status 2 in one place. Violations found
while checking a log are data (see ``tracecheck.report``), never exceptions.
"""

from __future__ import annotations


class TraceCheckError(Exception):
    """Base class for user-facing input and configuration errors."""


# -- ingestion ---------------------------------------------------------------


class IngestError(TraceCheckError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class MalformedLine(IngestError):
    pass


class UnknownKind(IngestError):
    def __init__(self, line_no: int, value):
        self.value = value
        super().__init__(line_no, f"unknown event kind {value!r}")


class MissingTime(IngestError):
    def __init__(self, line_no: int, field: str = "time"):
        super().__init__(line_no, f"missing time field {field!r}")


class InsufficientAnchors(TraceCheckError):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"clock alignment needs at least 2 anchors, got {count}")


class InvalidAnchors(TraceCheckError):
    pass


# -- specification language --------------------------------------------------


class SpecError(TraceCheckError):
    pass


class SpecSyntaxError(SpecError):
    def __init__(self, line: int, col: int, expected: str, found: str | None = None):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        msg = f"{line}:{col}: expected {expected}"
        if found is not None:
            msg += f", found {found}"
        super().__init__(msg)


class UnboundVariable(SpecError):
    def __init__(self, pattern: str, var: str):
        self.pattern = pattern
        self.var = var
        super().__init__(
            f"pattern {pattern}: variable {var!r} is not bound by the trigger "
            "or by an earlier ordered requirement that uses it afterwards"
        )


class DuplicateField(SpecError):
    def __init__(self, field: str, line: int = 0, col: int = 0):
        self.field = field
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: field {field!r} constrained twice")


class DuplicatePattern(SpecError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        self.name = name
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: pattern {name!r} defined twice")


# -- compilation and matching ------------------------------------------------


class UnknownPredicate(TraceCheckError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown predicate {name!r}")


class ArityMismatch(TraceCheckError):
    def __init__(self, name: str, expected: int, got: int):
        self.name = name
        self.expected = expected
        self.got = got
        super().__init__(f"predicate {name!r} takes {expected} argument(s), called with {got}")


class PredicateFailure(TraceCheckError):
    def __init__(self, name: str, cause: BaseException):
        self.name = name
        self.cause = cause
        super().__init__(f"predicate {name!r} raised {type(cause).__name__}: {cause}")


# -- monitoring and learning -------------------------------------------------


class LogTooLarge(TraceCheckError):
    def __init__(self, size: int, bound: int):
        self.size = size
        self.bound = bound
        super().__init__(f"reference checker accepts at most {bound} events, log has {size}")


class EmptyInput(TraceCheckError):
    pass


class ModelFormatError(TraceCheckError):
    pass


class ConfigError(TraceCheckError):
    pass
