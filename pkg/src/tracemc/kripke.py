"""Kripke structures: validation, deadlock closure, serialization, DOT export."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .formula import Atom, atom_from_text


class PortableModelError(ValueError):
    """Raised when a portable model document is malformed.

    The message names the path of the offending field, e.g.
    ``states[2].labels``.
    """


@dataclass(frozen=True, eq=True)
class KripkeStructure:
    """Finite transition system with propositional state labels.

    ``labeling`` maps every state to a frozenset of atoms.  Instances are
    treated as immutable snapshots; use :func:`close_deadlocks` or the
    trace-model builder to derive new ones.
    """

    states: frozenset[str]
    transitions: frozenset[tuple[str, str]]
    labeling: Mapping[str, frozenset[Atom]]
    initial: frozenset[str]

    @classmethod
    def from_parts(
        cls,
        states: Iterable[str],
        transitions: Iterable[tuple[str, str]],
        labeling: Mapping[str, Iterable[Atom]],
        initial: Iterable[str] = (),
    ) -> "KripkeStructure":
        """Normalize field types; states missing a labeling entry get the
        empty label set.  No validity checks (see :func:`validate`)."""
        state_set = frozenset(states)
        label_map = {s: frozenset(labeling.get(s, ())) for s in state_set}
        for s, atoms in labeling.items():
            if s not in label_map:
                label_map[s] = frozenset(atoms)
        return cls(
            states=state_set,
            transitions=frozenset((a, b) for a, b in transitions),
            labeling=label_map,
            initial=frozenset(initial),
        )

    def labels(self, state: str) -> frozenset[Atom]:
        return self.labeling.get(state, frozenset())


def adjacency(k: KripkeStructure) -> dict[str, list[str]]:
    """Successor map with deterministic (sorted) successor order."""
    out: dict[str, list[str]] = {s: [] for s in k.states}
    for a, b in sorted(k.transitions):
        out.setdefault(a, []).append(b)
    return out


def validate(k: KripkeStructure, require_total: bool = False) -> list[str]:
    """Return a sorted list of violation descriptions; empty means valid.

    With ``require_total`` every state must have at least one successor.
    """
    problems: list[str] = []
    for a, b in k.transitions:
        if a not in k.states:
            problems.append(f"transition source not a declared state: {a} -> {b}")
        if b not in k.states:
            problems.append(f"transition target not a declared state: {a} -> {b}")
    for s in k.initial:
        if s not in k.states:
            problems.append(f"initial state not declared: {s}")
    for s in k.states:
        if s not in k.labeling:
            problems.append(f"state without labeling entry: {s}")
    if require_total:
        sources = {a for a, _ in k.transitions}
        for s in k.states:
            if s not in sources:
                problems.append(f"deadlock: {s}")
    return sorted(problems)


def close_deadlocks(k: KripkeStructure) -> KripkeStructure:
    """Add a self-loop to every state with no outgoing transition."""
    sources = {a for a, _ in k.transitions}
    extra = {(s, s) for s in k.states if s not in sources}
    if not extra:
        return k
    return KripkeStructure(
        states=k.states,
        transitions=k.transitions | extra,
        labeling=dict(k.labeling),
        initial=k.initial,
    )


# -- portable JSON document ---------------------------------------------------

_DOC_KEYS = {"var", "states", "initial", "transitions"}


def _infer_var(k: KripkeStructure) -> str:
    names = {a.variable for atoms in k.labeling.values() for a in atoms if a.variable}
    if len(names) == 1:
        return next(iter(names))
    return "current_state"


def to_portable(k: KripkeStructure) -> str:
    """Serialize to the portable JSON text, deterministically ordered."""
    doc = {
        "var": _infer_var(k),
        "states": [
            {"id": s, "labels": sorted(a.text() for a in k.labels(s))}
            for s in sorted(k.states)
        ],
        "initial": sorted(k.initial),
        "transitions": [[a, b] for a, b in sorted(k.transitions)],
    }
    return json.dumps(doc, indent=2) + "\n"


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise PortableModelError(f"{path}: {message}")


def from_portable(text: str) -> KripkeStructure:
    """Parse the portable JSON text; raises PortableModelError on any
    schema or referential problem (duplicate ids, unknown endpoints)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PortableModelError(f"document: not valid JSON ({exc})") from exc
    _require(isinstance(doc, dict), "document", "expected a JSON object")
    unknown = set(doc) - _DOC_KEYS
    _require(not unknown, f"document.{sorted(unknown)[0] if unknown else ''}",
             "unknown key")
    for key in _DOC_KEYS:
        _require(key in doc, f"document.{key}", "missing required key")
    _require(isinstance(doc["var"], str) and doc["var"], "var",
             "expected a nonempty string")

    _require(isinstance(doc["states"], list), "states", "expected a list")
    states: set[str] = set()
    labeling: dict[str, frozenset[Atom]] = {}
    for i, entry in enumerate(doc["states"]):
        path = f"states[{i}]"
        _require(isinstance(entry, dict), path, "expected an object")
        extra = set(entry) - {"id", "labels"}
        _require(not extra, f"{path}.{sorted(extra)[0] if extra else ''}", "unknown key")
        _require("id" in entry, f"{path}.id", "missing required key")
        _require("labels" in entry, f"{path}.labels", "missing required key")
        sid = entry["id"]
        _require(isinstance(sid, str) and sid != "", f"{path}.id",
                 "expected a nonempty string")
        _require(sid not in states, f"{path}.id", f"duplicate state id: {sid}")
        _require(isinstance(entry["labels"], list), f"{path}.labels", "expected a list")
        atoms = []
        for j, label in enumerate(entry["labels"]):
            _require(isinstance(label, str) and label != "", f"{path}.labels[{j}]",
                     "expected a nonempty string")
            try:
                atoms.append(atom_from_text(label))
            except ValueError as exc:
                raise PortableModelError(f"{path}.labels[{j}]: {exc}") from exc
        states.add(sid)
        labeling[sid] = frozenset(atoms)

    _require(isinstance(doc["initial"], list), "initial", "expected a list")
    initial: set[str] = set()
    for i, sid in enumerate(doc["initial"]):
        _require(isinstance(sid, str), f"initial[{i}]", "expected a string")
        _require(sid in states, f"initial[{i}]", f"initial state not declared: {sid}")
        initial.add(sid)

    _require(isinstance(doc["transitions"], list), "transitions", "expected a list")
    transitions: set[tuple[str, str]] = set()
    for i, pair in enumerate(doc["transitions"]):
        path = f"transitions[{i}]"
        _require(isinstance(pair, list) and len(pair) == 2, path,
                 "expected a [source, target] pair")
        a, b = pair
        _require(isinstance(a, str) and isinstance(b, str), path,
                 "expected string endpoints")
        _require(a in states, path, f"transition endpoint not declared: {a}")
        _require(b in states, path, f"transition endpoint not declared: {b}")
        transitions.add((a, b))

    return KripkeStructure(
        states=frozenset(states),
        transitions=frozenset(transitions),
        labeling=labeling,
        initial=frozenset(initial),
    )


# -- DOT export ---------------------------------------------------------------

def _esc(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _quote(text: str) -> str:
    return '"' + _esc(text) + '"'


def export_dot(k: KripkeStructure) -> str:
    """Graphviz digraph: one node per state (initial states doubled),
    label lines carry the atomic propositions.  Deterministic output."""
    lines = ["digraph kripke {"]
    if k.states:
        lines.append("  rankdir=LR;")
    for s in sorted(k.states):
        atoms = ", ".join(sorted(a.text() for a in k.labels(s)))
        parts = [s, atoms] if atoms else [s]
        label = '"' + "\\n".join(_esc(p) for p in parts) + '"'
        shape = ', shape="doublecircle"' if s in k.initial else ""
        lines.append(f"  {_quote(s)} [label={label}{shape}];")
    for a, b in sorted(k.transitions):
        lines.append(f"  {_quote(a)} -> {_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
