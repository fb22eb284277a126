"""Command line interface: build, check, run, export.

Exit codes: 0 all properties hold (or command succeeded), 1 at least one
property failed, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .formula import Formula, FormulaSyntaxError, parse_formula, pretty
from .kripke import (
    KripkeStructure,
    PortableModelError,
    close_deadlocks,
    export_dot,
    from_portable,
    to_portable,
    validate,
)
from .mc import CheckError, Lasso, NonTotalStructure, VerificationResult, check
from .pipeline import (
    PipelineOptions,
    PipelineReport,
    SourceOpenError,
    command_source,
    file_source,
    run_pipeline,
    stdin_source,
)
from .tracemodel import TraceDiagnostics, build_model, parse_trace


class CliError(Exception):
    """User-facing failure; printed to stderr, exit status 2."""


@dataclass(frozen=True)
class PropertyEntry:
    name: str
    formula: Formula
    text: str
    line_number: int


_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def load_properties(path: str) -> list[PropertyEntry]:
    """One property per line, optionally ``name: formula``; ``#`` starts a
    comment.  Unnamed entries get phi<index> names.  Syntax errors are
    reported with file, line, and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw_lines = fh.readlines()
    except OSError as exc:
        raise CliError(str(exc)) from exc

    entries: list[PropertyEntry] = []
    names: set[str] = set()
    for line_number, raw in enumerate(raw_lines, start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        name: Optional[str] = None
        body = content
        column_offset = 0
        colon = content.find(":")
        if colon >= 0 and _NAME_RE.match(content[:colon].strip()):
            name = content[:colon].strip()
            body = content[colon + 1:]
            column_offset = colon + 1
        try:
            formula = parse_formula(body)
        except FormulaSyntaxError as exc:
            column = column_offset + exc.position
            raise CliError(
                f"{path}:{line_number}:{column}: {exc}"
            ) from exc
        if name is None:
            name = f"phi{len(entries) + 1}"
        if name in names:
            raise CliError(f"{path}:{line_number}: duplicate property name: {name}")
        names.add(name)
        entries.append(PropertyEntry(name, formula, body.strip(), line_number))
    return entries


def _load_model(path: str) -> KripkeStructure:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(str(exc)) from exc
    try:
        return from_portable(text)
    except PortableModelError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _require_total(model: KripkeStructure, closed: bool) -> KripkeStructure:
    if closed:
        model = close_deadlocks(model)
    problems = validate(model, require_total=True)
    if problems:
        hint = "" if closed else " (re-run with --close-deadlocks to add self-loops)"
        raise CliError("model rejected: " + "; ".join(problems) + hint)
    return model


# -- report rendering ---------------------------------------------------------

def _lasso_json(lasso: Optional[Lasso]):
    if lasso is None:
        return None
    return {"prefix": list(lasso.prefix), "cycle": list(lasso.cycle)}


def _result_row(entry: PropertyEntry, result: VerificationResult) -> dict:
    return {
        "name": entry.name,
        "property": pretty(entry.formula),
        "holds": result.holds,
        "witness": _lasso_json(result.witness),
        "warnings": list(result.warnings),
    }


def _print_plain(rows: list[tuple[PropertyEntry, VerificationResult]],
                 out=None) -> None:
    out = out or sys.stdout
    width = max((len(e.name) for e, _ in rows), default=4)
    for entry, result in rows:
        verdict = "True" if result.holds else "False"
        print(f"{entry.name:<{width}}  {verdict:<5}  {pretty(entry.formula)}", file=out)
        if result.witness is not None:
            prefix = " ".join(result.witness.prefix)
            cycle = " ".join(result.witness.cycle)
            print(f"{'':<{width}}  lasso  prefix=[{prefix}] cycle=[{cycle}]", file=out)
        for note in result.warnings:
            print(f"warning: {entry.name}: {note}", file=sys.stderr)


def _emit_results(args, rows, extra: Optional[dict] = None) -> int:
    if getattr(args, "json", False):
        doc = {
            "results": [_result_row(e, r) for e, r in rows],
            "all_hold": all(r.holds for _, r in rows),
        }
        if extra:
            doc.update(extra)
        print(json.dumps(doc, indent=2))
    else:
        if extra:
            for line in extra.get("_plain_lines", ()):
                print(line)
        _print_plain(rows)
    return 0 if all(r.holds for _, r in rows) else 1


# -- subcommands ----------------------------------------------------------------

def cmd_build(args) -> int:
    sequences = []
    for path in args.traces:
        diagnostics = TraceDiagnostics()
        try:
            with open(path, encoding="utf-8", errors="replace") as fh:
                parsed = parse_trace(fh, keep_prefix=args.keep_prefix,
                                     diagnostics=diagnostics)
        except OSError as exc:
            raise CliError(str(exc)) from exc
        for d in diagnostics.entries:
            print(f"{d.severity}: {path}:{d.line_number}: {d.message}", file=sys.stderr)
        if not parsed:
            print(f"warning: {path}: no sequences found", file=sys.stderr)
        sequences.extend(parsed)

    override = (args.initial,) if args.initial else None
    model = build_model(sequences, var=args.var, initial_override=override)
    if args.close_deadlocks:
        model = close_deadlocks(model)
    try:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(to_portable(model))
    except OSError as exc:
        raise CliError(str(exc)) from exc
    return 0


def cmd_check(args) -> int:
    model = _load_model(args.model)
    model = _require_total(model, args.close_deadlocks)
    entries = load_properties(args.properties)
    rows = [(e, check(model, e.formula, want_witness=args.witness)) for e in entries]
    return _emit_results(args, rows)


def cmd_run(args) -> int:
    sources = []
    for path in args.traces or ():
        sources.append(stdin_source() if path == "-" else file_source(path))
    for command_line in args.trace_cmd or ():
        sources.append(command_source(command_line))
    if not sources:
        raise CliError("run requires at least one trace source (-t or --trace-cmd)")

    entries = load_properties(args.properties)
    options = PipelineOptions(
        var=args.var,
        keep_prefix=args.keep_prefix,
        jobs=args.jobs,
        close_deadlocks=True,
        witness=False,
    )
    try:
        report = run_pipeline(sources, [e.formula for e in entries], options)
    except SourceOpenError as exc:
        raise CliError(str(exc)) from exc

    for stats in report.sources:
        for err in stats.errors:
            print(f"warning: {stats.name}: {err}", file=sys.stderr)
    print(
        f"timings: ingest={report.times.ingest_ms:.1f}ms check={report.times.check_ms:.1f}ms",
        file=sys.stderr,
    )

    rows = list(zip(entries, report.results))
    source_rows = [
        {
            "name": s.name,
            "sequences": s.sequences,
            "transitions": s.transitions,
            "warnings": s.warnings,
            "errors": list(s.errors),
        }
        for s in report.sources
    ]
    extra = {
        "sources": source_rows,
        "model": {
            "states": len(report.model.states),
            "transitions": len(report.model.transitions),
        },
        "_plain_lines": [
            f"source {s.name}: sequences={s.sequences} transitions={s.transitions} "
            f"warnings={s.warnings}"
            for s in report.sources
        ]
        + [
            f"model: states={len(report.model.states)} "
            f"transitions={len(report.model.transitions)}"
        ],
    }
    if getattr(args, "json", False):
        extra.pop("_plain_lines")
    return _emit_results(args, rows, extra)


def cmd_export(args) -> int:
    model = _load_model(args.model)
    try:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(export_dot(model))
    except OSError as exc:
        raise CliError(str(exc)) from exc
    return 0


# -- parser ---------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracemc",
        description="Build state models from execution traces and check CTL* properties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="parse traces into a portable model file")
    p_build.add_argument("-t", "--trace", dest="traces", nargs="+", action="extend",
                         required=True, metavar="PATH")
    p_build.add_argument("-o", "--output", required=True, metavar="PATH")
    p_build.add_argument("--close-deadlocks", action="store_true")
    p_build.add_argument("--var", default="current_state", metavar="IDENT")
    p_build.add_argument("--initial", default=None, metavar="STATE",
                         help="replace the initial-state set with this state")
    p_build.add_argument("--keep-prefix", action="store_true",
                         help="keep dotted prefixes on observed values")
    p_build.set_defaults(func=cmd_build)

    p_check = sub.add_parser("check", help="check properties against a model file")
    p_check.add_argument("-m", "--model", required=True, metavar="PATH")
    p_check.add_argument("-p", "--properties", required=True, metavar="PATH")
    p_check.add_argument("--witness", action="store_true")
    p_check.add_argument("--json", action="store_true")
    p_check.add_argument("--close-deadlocks", action="store_true")
    p_check.set_defaults(func=cmd_check)

    p_run = sub.add_parser("run", help="ingest traces and check properties in one go")
    p_run.add_argument("-t", "--trace", dest="traces", nargs="+", action="extend",
                       metavar="PATH")
    p_run.add_argument("--trace-cmd", dest="trace_cmd", action="append",
                       metavar="CMD", help="read trace lines from a child process")
    p_run.add_argument("-p", "--properties", required=True, metavar="PATH")
    p_run.add_argument("--jobs", type=int, default=None, metavar="N")
    p_run.add_argument("--json", action="store_true")
    p_run.add_argument("--var", default="current_state", metavar="IDENT")
    p_run.add_argument("--keep-prefix", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_export = sub.add_parser("export", help="write a Graphviz view of a model file")
    p_export.add_argument("-m", "--model", required=True, metavar="PATH")
    p_export.add_argument("--dot", required=True, metavar="PATH")
    p_export.set_defaults(func=cmd_export)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NonTotalStructure, CheckError, PortableModelError,
            FormulaSyntaxError, SourceOpenError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
