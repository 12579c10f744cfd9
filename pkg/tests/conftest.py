from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from tracecheck.compiler import compile_spec
from tracecheck.events import Event, EventKind
from tracecheck.speclang import parse_spec

DATA = Path(__file__).parent / "data"

# timing varies a lot across machines; correctness is what these tests pin
settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def E(kind, time=0, **fields):
    """Shorthand event factory; index is assigned by make_log/finalize."""
    return Event(EventKind(kind), time, -1, fields)


def cmd(stem="PICT", number=7, time=0, type_="FlightSoftwareCommand"):
    return E("COMMAND", time, Type=type_, Stem=stem, Number=number)


def evr(field, stem="PICT", number=7, time=0):
    return E("EVR", time, **{field: stem, "Number": number})


@pytest.fixture(scope="session")
def success_text():
    return (DATA / "command_success.lsc").read_text()


@pytest.fixture(scope="session")
def success_spec(success_text):
    return parse_spec(success_text)


@pytest.fixture(scope="session")
def success_automaton(success_spec):
    return compile_spec(success_spec)[0]


# -- acceptance summary --------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
