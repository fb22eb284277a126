"""Source rewrites that expose a class method as a standalone traced function.

Three independent passes over Python source:

* ``extract_function`` copies one method to module level, renaming every
  designated ``self.X`` reference to ``X__<ClassName>`` and lifting those
  names into leading parameters, so the function can be driven without an
  instance.
* ``insert_markers`` wraps branch arms that touch a designated name in
  ``[BEGIN IF]``/``[END IF]`` prints and brackets assignments to designated
  names with before/``->``/after value prints.
* ``deactivate_calls`` replaces calls on a denylist (hardware I/O and the
  like) with ``None`` so the function can run on a bare machine.

All passes emit source via ast.unparse, so output formatting is canonical
regardless of the input style.
"""

import ast
import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence


class InstrumenterError(Exception):
    """Configuration or subject-source problem that prevents rewriting."""


@dataclass(frozen=True)
class ExtractionConfig:
    """What to extract and how to drive it.

    ``patterns`` maps each designated attribute to the integer values the
    driver should enumerate; ``data`` lists per-run data items (file paths)
    forwarded to the function's remaining parameter, if it has one.
    """

    source: str
    class_name: str
    method: str
    attributes: tuple[str, ...]
    deactivate: tuple[str, ...] = ()
    patterns: dict[str, tuple[int, ...]] = field(default_factory=dict)
    data: tuple[str, ...] = ()

    def read_source(self) -> str:
        return Path(self.source).read_text(encoding="utf-8")


@dataclass(frozen=True)
class TransformReport:
    source: str
    renamed: dict[str, str] = field(default_factory=dict)
    markers: int = 0
    deactivated: tuple[tuple[str, int], ...] = ()
    warnings: tuple[str, ...] = ()


def _print_stmt(payload) -> ast.Expr:
    arg = ast.Constant(payload) if isinstance(payload, str) else payload
    return ast.Expr(ast.Call(func=ast.Name("print", ast.Load()), args=[arg], keywords=[]))


def _find_class(tree: ast.Module, name: str, origin: str) -> ast.ClassDef:
    for node in tree.body:
        if isinstance(node, ast.ClassDef) and node.name == name:
            return node
    raise InstrumenterError(f"class {name} not found in {origin}")


def _find_method(cls: ast.ClassDef, name: str) -> ast.FunctionDef:
    for node in cls.body:
        if isinstance(node, ast.FunctionDef) and node.name == name:
            return node
    raise InstrumenterError(f"method {name} not found in class {cls.name}")


class _SelfRenamer(ast.NodeTransformer):
    """self.X -> X__<ClassName> for designated X; other self.* kept as-is."""

    def __init__(self, class_name: str, designated: set[str]):
        self.class_name = class_name
        self.designated = designated
        self.seen: set[str] = set()
        self.leftover: set[str] = set()

    def visit_Attribute(self, node: ast.Attribute):
        self.generic_visit(node)
        if isinstance(node.value, ast.Name) and node.value.id == "self":
            if node.attr in self.designated:
                self.seen.add(node.attr)
                return ast.copy_location(
                    ast.Name(f"{node.attr}__{self.class_name}", node.ctx), node)
            self.leftover.add(node.attr)
        return node


def extract_function(config: ExtractionConfig) -> TransformReport:
    """Append ``<method>__<ClassName>`` to the module, self-free.

    The original module body is preserved untouched (the function still
    needs its imports, enums, and sibling definitions); only a new
    module-level function is added at the end.
    """
    tree = ast.parse(config.read_source())
    cls = _find_class(tree, config.class_name, config.source)
    method = _find_method(cls, config.method)

    fn = copy.deepcopy(method)
    renamer = _SelfRenamer(config.class_name, set(config.attributes))
    fn = renamer.visit(fn)
    fn.name = f"{config.method}__{config.class_name}"
    fn.decorator_list = []

    rest = fn.args.args
    if rest and rest[0].arg == "self":
        rest = rest[1:]
    lifted = [ast.arg(arg=f"{a}__{config.class_name}") for a in config.attributes]
    fn.args = ast.arguments(
        posonlyargs=[], args=lifted + rest, vararg=fn.args.vararg,
        kwonlyargs=fn.args.kwonlyargs, kw_defaults=fn.args.kw_defaults,
        kwarg=fn.args.kwarg, defaults=fn.args.defaults)

    warnings = [
        f"attribute {a} is never referenced in {config.class_name}.{config.method}"
        for a in config.attributes if a not in renamer.seen
    ]
    warnings += [
        f"self.{name} kept verbatim (not a designated attribute)"
        for name in sorted(renamer.leftover)
    ]

    renamed = {f"self.{a}": f"{a}__{config.class_name}" for a in sorted(renamer.seen)}
    renamed[f"{config.class_name}.{config.method}"] = fn.name

    out = ast.Module(body=list(tree.body) + [fn], type_ignores=[])
    return TransformReport(
        source=ast.unparse(ast.fix_missing_locations(out)) + "\n",
        renamed=renamed,
        warnings=tuple(warnings),
    )


class _MarkerInserter(ast.NodeTransformer):
    def __init__(self, names: set[str]):
        self.names = names
        self.count = 0
        self.warnings: list[str] = []

    def _touches(self, node: ast.AST) -> bool:
        return any(isinstance(n, ast.Name) and n.id in self.names
                   for n in ast.walk(node))

    def _wrap(self, body: list) -> list:
        self.count += 2
        return [_print_stmt("[BEGIN IF]"), *body, _print_stmt("[END IF]")]

    def visit_If(self, node: ast.If):
        # decide from the untouched subtree, then rewrite children
        test_hit = self._touches(node.test)
        body_hit = test_hit or any(self._touches(s) for s in node.body)
        is_elif = len(node.orelse) == 1 and isinstance(node.orelse[0], ast.If)
        else_hit = (not is_elif and node.orelse
                    and (test_hit or any(self._touches(s) for s in node.orelse)))
        self.generic_visit(node)
        if body_hit:
            node.body = self._wrap(node.body)
        if else_hit:
            node.orelse = self._wrap(node.orelse)
        return node

    def _bracket(self, stmt: ast.stmt, name: str) -> list:
        self.count += 3
        probe = lambda: ast.Name(name, ast.Load())
        return [_print_stmt(probe()), _print_stmt("->"), stmt, _print_stmt(probe())]

    def visit_Assign(self, node: ast.Assign):
        self.generic_visit(node)
        hits = [t.id for t in node.targets
                if isinstance(t, ast.Name) and t.id in self.names]
        if not hits:
            return node
        if len(hits) > 1:
            self.warnings.append(
                f"chained assignment instruments only {hits[0]} "
                f"(also assigns {', '.join(hits[1:])})")
        return self._bracket(node, hits[0])

    def visit_AugAssign(self, node: ast.AugAssign):
        self.generic_visit(node)
        if isinstance(node.target, ast.Name) and node.target.id in self.names:
            return self._bracket(node, node.target.id)
        return node

    def visit_AnnAssign(self, node: ast.AnnAssign):
        self.generic_visit(node)
        if (node.value is not None and isinstance(node.target, ast.Name)
                and node.target.id in self.names):
            return self._bracket(node, node.target.id)
        return node


def insert_markers(source: str, designated: Iterable[str]) -> TransformReport:
    """Add the branch and assignment trace prints for ``designated`` names.

    Each branch arm is wrapped independently; an elif chain is a nested
    conditional and wraps its own arms. Arms qualify when the test or the
    arm itself mentions a designated name.
    """
    tree = ast.parse(source)
    inserter = _MarkerInserter(set(designated))
    tree = inserter.visit(tree)
    return TransformReport(
        source=ast.unparse(ast.fix_missing_locations(tree)) + "\n",
        markers=inserter.count,
        warnings=tuple(inserter.warnings),
    )


def _callee_name(call: ast.Call) -> Optional[str]:
    if isinstance(call.func, ast.Name):
        return call.func.id
    if isinstance(call.func, ast.Attribute):
        return call.func.attr
    return None


class _Deactivator(ast.NodeTransformer):
    def __init__(self, denylist: set[str]):
        self.denylist = denylist
        self.sites: list[tuple[str, int]] = []
        self.warnings: list[str] = []

    def _match(self, node: ast.AST) -> Optional[str]:
        if isinstance(node, ast.Call):
            name = _callee_name(node)
            if name in self.denylist:
                return name
        return None

    def visit_Expr(self, node: ast.Expr):
        name = self._match(node.value)
        if name is not None:
            index = len(self.sites)
            self.sites.append((name, node.lineno))
            return ast.copy_location(
                ast.Expr(ast.Name(f"__DEACTIVATED_{index}__", ast.Load())), node)
        self.generic_visit(node)
        return node

    def visit_Call(self, node: ast.Call):
        self.generic_visit(node)
        name = self._match(node)
        if name is not None:
            self.sites.append((name, node.lineno))
            self.warnings.append(
                f"call to {name} on line {node.lineno} replaced by None "
                f"inside an expression")
            return ast.copy_location(ast.Constant(None), node)
        return node


def deactivate_calls(source: str, denylist: Sequence[str]) -> TransformReport:
    """Replace denylisted calls with ``None``.

    Statement-level calls become ``None  # deactivated: <name>``; calls
    nested inside expressions become a bare ``None`` and are reported via
    a warning since no comment can be attached there.
    """
    if not denylist:
        return TransformReport(source=source)
    tree = ast.parse(source)
    deactivator = _Deactivator(set(denylist))
    tree = deactivator.visit(tree)
    text = ast.unparse(ast.fix_missing_locations(tree)) + "\n"
    for index, (name, _) in enumerate(deactivator.sites):
        text = text.replace(f"__DEACTIVATED_{index}__",
                            f"None  # deactivated: {name}")
    return TransformReport(
        source=text,
        deactivated=tuple(deactivator.sites),
        warnings=tuple(deactivator.warnings),
    )
