"""Command line front end: instrument a subject file and emit the driver.

Writes ``<stem>_transformed.py`` and ``<stem>_driver.py`` into the output
directory; the original source is never modified.
"""

import argparse
import sys
from pathlib import Path

from .driver import generate_driver
from .transform import (
    ExtractionConfig,
    InstrumenterError,
    deactivate_calls,
    extract_function,
    insert_markers,
)


def load_patterns(path: str) -> dict[str, tuple[int, ...]]:
    """One ``attr: v1,v2,...`` line per attribute; # starts a comment."""
    patterns: dict[str, tuple[int, ...]] = {}
    text = Path(path).read_text(encoding="utf-8")
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, colon, rest = line.partition(":")
        name = name.strip()
        if not colon or not name.isidentifier():
            raise InstrumenterError(f"{path}:{number}: expected 'attr: v1,v2,...'")
        try:
            values = tuple(int(piece) for piece in rest.split(","))
        except ValueError:
            raise InstrumenterError(
                f"{path}:{number}: pattern values must be integers") from None
        if name in patterns:
            raise InstrumenterError(f"{path}:{number}: duplicate attribute {name}")
        patterns[name] = values
    return patterns


def instrument(config: ExtractionConfig, out_dir: str) -> tuple[Path, Path]:
    """Run all passes and write the two outputs; returns their paths."""
    extracted = extract_function(config)
    renamed = [f"{a}__{config.class_name}" for a in config.attributes]
    marked = insert_markers(extracted.source, renamed)
    final = deactivate_calls(marked.source, config.deactivate)
    driver = generate_driver(config)

    for report in (extracted, marked, final):
        for warning in report.warnings:
            print(f"warning: {warning}", file=sys.stderr)
    if not config.data:
        print("warning: no data items; the driver will execute nothing",
              file=sys.stderr)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(config.source).stem
    transformed_path = out / f"{stem}_transformed.py"
    driver_path = out / f"{stem}_driver.py"
    transformed_path.write_text(final.source, encoding="utf-8")
    driver_path.write_text(driver, encoding="utf-8")

    print(f"renamed: {', '.join(f'{o} -> {n}' for o, n in extracted.renamed.items())}")
    print(f"markers inserted: {marked.markers}")
    print(f"calls deactivated: {len(final.deactivated)}")
    print(f"wrote {transformed_path}")
    print(f"wrote {driver_path}")
    return transformed_path, driver_path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="instrument",
        description="Rewrite a class method into a traced function and "
                    "generate its input-enumeration driver.")
    parser.add_argument("--source", required=True, help="subject source file")
    parser.add_argument("--class", dest="class_name", required=True,
                        metavar="NAME", help="class containing the method")
    parser.add_argument("--method", required=True, help="method to extract")
    parser.add_argument("--attr", dest="attributes", action="extend", nargs="+",
                        required=True, metavar="NAME",
                        help="designated state attribute (repeatable)")
    parser.add_argument("--deactivate", action="extend", nargs="+", default=[],
                        metavar="NAME", help="call names to replace with None")
    parser.add_argument("--patterns", required=True,
                        help="file with one 'attr: v1,v2,...' line per attribute")
    parser.add_argument("--data", action="extend", nargs="+", default=[],
                        metavar="PATH", help="data items fed to the function")
    parser.add_argument("--out-dir", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code if isinstance(exit_.code, int) else 2
    try:
        patterns = load_patterns(args.patterns)
        config = ExtractionConfig(
            source=args.source,
            class_name=args.class_name,
            method=args.method,
            attributes=tuple(args.attributes),
            deactivate=tuple(args.deactivate),
            patterns=patterns,
            data=tuple(args.data),
        )
        instrument(config, args.out_dir)
    except (InstrumenterError, OSError, SyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    raise SystemExit(main())
