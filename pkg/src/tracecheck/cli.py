"""Command line entry point.

Exit status: 0 pass/match, 1 violations/mismatch, 2 usage, parse or I/O error.
"""

from __future__ import annotations

import argparse
import importlib
import importlib.util
import json
import os
import sys
from pathlib import Path

from .compiler import compile_spec
from .dot import to_dot
from .errors import ConfigError, SpecSyntaxError, TraceCheckError
from .learner import EqualityConfig, LearnedModel, diff, endorse, learn
from .logmaker import IngestConfig, finalize, ingest, ingest_csv, load_anchors, serialize, time_align
from .matching import PredicateRegistry
from .monitor import check
from .report import render_text
from .speclang import parse_spec, pretty_print

EXIT_OK, EXIT_FOUND, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- loading helpers ---------------------------------------------------------


def _read_json(path: str, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except ValueError as exc:
        raise ConfigError(f"{path}: invalid {what} JSON: {exc}") from None


def load_spec(path: str):
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return parse_spec(data)
    except TraceCheckError as exc:
        raise TraceCheckError(f"{path}:{exc}" if isinstance(exc, SpecSyntaxError) else f"{path}: {exc}") from exc


def load_predicates(target: str | None) -> PredicateRegistry:
    """Import ``PREDICATES`` (a mapping or registry) from a module name or ``.py`` file."""
    if not target:
        return PredicateRegistry()
    try:
        if target.endswith(".py") or os.sep in target:
            spec = importlib.util.spec_from_file_location("_tracecheck_user_predicates", target)
            if spec is None or spec.loader is None:
                raise ConfigError(f"cannot load predicates from {target}")
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
        else:
            mod = importlib.import_module(target)
    except (ImportError, OSError, SyntaxError) as exc:
        raise ConfigError(f"cannot load predicates from {target}: {exc}") from None
    preds = getattr(mod, "PREDICATES", None)
    if isinstance(preds, PredicateRegistry):
        return preds
    if isinstance(preds, dict):
        return PredicateRegistry(preds)
    raise ConfigError(f"{target} defines no PREDICATES mapping")


def ingest_config(args) -> IngestConfig:
    doc = _read_json(args.ingest_config, "ingest config") if args.ingest_config else {}
    if not isinstance(doc, dict):
        raise ConfigError("ingest config must be a JSON object")
    if args.time_unit:
        doc = {**doc, "time_unit": args.time_unit}
    return IngestConfig.from_json(doc)


def _aligned(events, anchor_path: str):
    doc = _read_json(anchor_path, "time anchors")
    anchors = load_anchors(doc)
    select = doc.get("apply_to") if isinstance(doc, dict) else None
    if select is None:
        return time_align(events, anchors)
    if not isinstance(select, dict) or "field" not in select or "equals" not in select:
        raise ConfigError("'apply_to' needs 'field' and 'equals'")
    picked = [i for i, e in enumerate(events) if e.get(select["field"]) == select["equals"]]
    moved = time_align([events[i] for i in picked], anchors)
    out = list(events)
    for i, e in zip(picked, moved):
        out[i] = e
    return out


def load_log(path: str, cfg: IngestConfig, anchors: str | None = None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        # canonical logs (e.g. `make` output) carry META brackets; finalize replaces them
        events = ingest_csv(text, cfg) if path.lower().endswith(".csv") else ingest(text, cfg, allow_meta=True)
    except TraceCheckError as exc:
        raise TraceCheckError(f"{path}: {exc}") from exc
    if anchors:
        events = _aligned(events, anchors)
    return finalize(events, path)


# -- subcommands -------------------------------------------------------------


def cmd_check(args) -> int:
    spec = load_spec(args.spec)
    automata = compile_spec(spec, load_predicates(args.predicates))
    cfg = ingest_config(args)
    logs = [load_log(p, cfg, args.time_anchors) for p in args.logs]
    if args.dot:
        _write_dots(automata, args.dot)
    reports = [check(automata, log, epsilon=args.epsilon) for log in logs]
    if args.format == "json":
        text = "".join(r.dumps(args.max_violations) + "\n" for r in reports)
    else:
        parts = []
        for log, r in zip(logs, reports):
            body = render_text(r, args.max_violations)
            ties = log.time_ties()
            if ties:
                n = sum(len(g) for g in ties)
                body = body.replace("\n", f"\nnote: {n} events share timestamps; kept in input order\n", 1)
            parts.append(body)
        text = "\n".join(parts)
    _emit(text, args.output)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FOUND


def _write_dots(automata, out_dir: str) -> list[Path]:
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    for a in automata:
        p = d / f"{a.pattern_name}.dot"
        p.write_text(to_dot(a), encoding="utf-8")
        written.append(p)
    return written


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_parse(args) -> int:
    spec = load_spec(args.spec)
    if args.predicates:
        compile_spec(spec, load_predicates(args.predicates))
    sys.stdout.write(pretty_print(spec))
    return EXIT_OK


def cmd_viz(args) -> int:
    spec = load_spec(args.spec)
    automata = compile_spec(spec, load_predicates(args.predicates))
    for p in _write_dots(automata, args.out_dir):
        print(p)
    return EXIT_OK


def cmd_make(args) -> int:
    log = load_log(args.log, ingest_config(args), args.time_anchors)
    _emit(serialize(log), args.output)
    return EXIT_OK


def cmd_learn(args) -> int:
    cfg = EqualityConfig.from_json(_read_json(args.equality, "equality config")) if args.equality else EqualityConfig()
    icfg = ingest_config(args)
    logs = [load_log(p, icfg, args.time_anchors) for p in args.logs]
    model = learn(logs, cfg)
    if args.endorse:
        model = endorse(model)
    _emit(model.dumps(), args.output)
    return EXIT_OK


def _load_model(path: str) -> LearnedModel:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return LearnedModel.loads(text)
    except TraceCheckError as exc:
        raise TraceCheckError(f"{path}: {exc}") from exc


def cmd_diff(args) -> int:
    model = _load_model(args.model)
    log = load_log(args.log, ingest_config(args), args.time_anchors)
    d = diff(model, log)
    if args.format == "json":
        _emit(json.dumps(d.to_json(), ensure_ascii=False, separators=(",", ":")) + "\n", args.output)
    else:
        _emit(d.render(), args.output)
    return EXIT_OK if d.match else EXIT_FOUND


def cmd_endorse(args) -> int:
    model = endorse(_load_model(args.model))
    Path(args.output or args.model).write_text(model.dumps(), encoding="utf-8")
    return EXIT_OK


# -- argument parsing --------------------------------------------------------


def _nonneg_int(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tracecheck", description="Check event logs against temporal patterns; learn and diff runs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def log_options(sp):
        sp.add_argument("--ingest-config", metavar="FILE", help="JSON: kind_field, time_field, kind_aliases, time_unit")
        sp.add_argument("--time-unit", choices=("s", "ms", "us"), help="unit of raw timestamps (default us)")
        sp.add_argument("--time-anchors", metavar="FILE", help="JSON clock anchors for time alignment")

    c = sub.add_parser("check", help="check logs against a spec")
    c.add_argument("spec")
    c.add_argument("logs", nargs="+")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("-o", "--output", metavar="FILE")
    c.add_argument("--dot", metavar="DIR", help="also write one .dot file per pattern")
    c.add_argument("--max-violations", type=_nonneg_int, default=0, metavar="N", help="0 = unlimited")
    c.add_argument("--predicates", metavar="MODULE", help="module or .py file defining PREDICATES")
    c.add_argument("--epsilon", type=float, default=0.0, help="float comparison tolerance")
    log_options(c)
    c.set_defaults(func=cmd_check)

    pr = sub.add_parser("parse", help="parse a spec and print it in canonical form")
    pr.add_argument("spec")
    pr.add_argument("--predicates", metavar="MODULE")
    pr.set_defaults(func=cmd_parse)

    v = sub.add_parser("viz", help="write one Graphviz .dot file per pattern")
    v.add_argument("spec")
    v.add_argument("out_dir")
    v.add_argument("--predicates", metavar="MODULE")
    v.set_defaults(func=cmd_viz)

    m = sub.add_parser("make", help="normalize a raw log into canonical JSON-lines")
    m.add_argument("log")
    m.add_argument("-o", "--output", metavar="FILE")
    log_options(m)
    m.set_defaults(func=cmd_make)

    lr = sub.add_parser("learn", help="learn a trace model from good runs")
    lr.add_argument("logs", nargs="+")
    lr.add_argument("--equality", metavar="FILE", help="JSON equality config")
    lr.add_argument("-o", "--output", metavar="FILE")
    lr.add_argument("--endorse", action="store_true")
    log_options(lr)
    lr.set_defaults(func=cmd_learn)

    d = sub.add_parser("diff", help="diff a log against a learned model")
    d.add_argument("model")
    d.add_argument("log")
    d.add_argument("--format", choices=("text", "json"), default="text")
    d.add_argument("-o", "--output", metavar="FILE")
    log_options(d)
    d.set_defaults(func=cmd_diff)

    e = sub.add_parser("endorse", help="mark a model as endorsed")
    e.add_argument("model")
    e.add_argument("-o", "--output", metavar="FILE")
    e.set_defaults(func=cmd_endorse)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"tracecheck: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    try:
        return args.func(args)
    except (TraceCheckError, OSError, UnicodeDecodeError) as exc:
        print(f"tracecheck: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
