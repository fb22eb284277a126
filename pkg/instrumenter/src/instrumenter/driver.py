"""Generate the enumeration driver for an extracted function.

The driver replaces path exploration with brute force: it runs the
function once per element of (pattern values for each designated
attribute) x (data items), printing the header, one input-vector line per
combination, and an ``[initialize]`` block naming the starting state, so
its stdout is directly consumable by the trace parser.
"""

import ast
from pathlib import Path

from .transform import ExtractionConfig, InstrumenterError, _find_class, _find_method


def _decode_map(cls: ast.ClassDef, attributes: tuple[str, ...]) -> dict[str, str]:
    """attribute -> enum class name, learned from ``self.X = Enum.CONST``
    assignments in __init__. Attributes without such an assignment are
    passed through as plain integers."""
    decode: dict[str, str] = {}
    try:
        init = _find_method(cls, "__init__")
    except InstrumenterError:
        return decode
    for node in ast.walk(init):
        if not (isinstance(node, ast.Assign) and len(node.targets) == 1):
            continue
        target = node.targets[0]
        if not (isinstance(target, ast.Attribute)
                and isinstance(target.value, ast.Name)
                and target.value.id == "self"
                and target.attr in attributes):
            continue
        value = node.value
        if (isinstance(value, ast.Attribute)
                and isinstance(value.value, ast.Name)):
            decode[target.attr] = value.value.id
    return decode


def generate_driver(config: ExtractionConfig) -> str:
    """Return driver source; does not touch the filesystem."""
    for attr in config.attributes:
        if not config.patterns.get(attr):
            raise InstrumenterError(f"no input pattern values for attribute {attr}")

    tree = ast.parse(config.read_source())
    cls = _find_class(tree, config.class_name, config.source)
    method = _find_method(cls, config.method)
    extra = [a.arg for a in method.args.args if a.arg != "self"]
    if len(extra) > 1:
        raise InstrumenterError(
            f"method {config.method} takes {len(extra)} parameters besides self; "
            f"at most one (the data item) is supported")

    module = Path(config.source).stem + "_transformed"
    fn = f"{config.method}__{config.class_name}"
    decode = _decode_map(cls, config.attributes)
    enum_imports = sorted(set(decode.values()))
    imports = ", ".join([fn] + enum_imports)
    decode_src = ("{" + ", ".join(f"{attr!r}: {enum}"
                                  for attr, enum in sorted(decode.items())) + "}")
    patterns_src = ("{" + ", ".join(f"{a!r}: {list(config.patterns[a])!r}"
                                    for a in config.attributes) + "}")
    call = f"{fn}(*args, item)" if extra else f"{fn}(*args)"

    return f'''"""Runs {module}.{fn} over every input combination."""

import itertools
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from {module} import {imports}

ATTRIBUTES = {list(config.attributes)!r}
PATTERNS = {patterns_src}
DATA = {list(config.data)!r}
DECODE = {decode_src}


def _decode(name, value):
    enum = DECODE.get(name)
    return enum(value) if enum is not None else value


def main():
    if not DATA:
        print("no data items; nothing to execute", file=sys.stderr)
        return
    print("Exploring {module}.{fn}")
    for values in itertools.product(*(PATTERNS[a] for a in ATTRIBUTES)):
        for item in DATA:
            print(repr(list(zip(ATTRIBUTES, values))))
            args = [_decode(a, v) for a, v in zip(ATTRIBUTES, values)]
            print("[initialize]")
            print(args[0])
            {call}


if __name__ == "__main__":
    main()
'''
