"""Trace ingestion: line classification, execution sequences, model building.

The input format is the println-style log emitted by instrumented code.
Each line is classified after trimming surrounding whitespace:

1. starts with ``Exploring ``            -> header (new exploration run)
2. starts with ``[(`` and ends ``)]``    -> input vector, opens a sequence
3. exactly ``[initialize]``              -> the next value line is an
                                            initial observation
4. exactly ``[BEGIN IF]`` / ``[END IF]`` -> branch scope markers
5. exactly ``->``                        -> transition arrow; binds the
                                            immediately adjacent value lines
6. anything else nonblank                -> value line

Value tokens like ``TelloState.LEFT`` are normalized to the part after the
last dot unless ``keep_prefix`` is set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional

from .formula import Atom
from .kripke import KripkeStructure


class EventKind(Enum):
    HEADER = "header"
    INPUT_VECTOR = "input_vector"
    INIT_MARKER = "init_marker"
    BEGIN_IF = "begin_if"
    END_IF = "end_if"
    ARROW = "arrow"
    VALUE = "value"


@dataclass(frozen=True)
class TraceEvent:
    kind: EventKind
    text: str
    line_number: int


@dataclass(frozen=True)
class TransitionRecord:
    source: str
    target: str
    line_number: int  # line of the arrow marker


@dataclass
class ExecutionSequence:
    """One instrumented run: its input vector, the states observed right
    after ``[initialize]``, and the recorded transitions in order."""

    inputs: list[tuple[str, int]] = field(default_factory=list)
    initial_observations: list[str] = field(default_factory=list)
    transitions: list[TransitionRecord] = field(default_factory=list)


@dataclass(frozen=True)
class TraceDiagnostic:
    severity: str  # "warning" or "error"
    line_number: int
    message: str


@dataclass
class TraceDiagnostics:
    """Collector for parse problems; parsing never raises on bad input."""

    entries: list[TraceDiagnostic] = field(default_factory=list)

    def warning(self, line_number: int, message: str) -> None:
        self.entries.append(TraceDiagnostic("warning", line_number, message))

    def error(self, line_number: int, message: str) -> None:
        self.entries.append(TraceDiagnostic("error", line_number, message))

    @property
    def warnings(self) -> list[TraceDiagnostic]:
        return [d for d in self.entries if d.severity == "warning"]

    @property
    def errors(self) -> list[TraceDiagnostic]:
        return [d for d in self.entries if d.severity == "error"]


def classify_line(line: str) -> Optional[EventKind]:
    """Event kind of a single trimmed line; None for blank lines."""
    text = line.strip()
    if not text:
        return None
    if text.startswith("Exploring "):
        return EventKind.HEADER
    if text.startswith("[(") and text.endswith(")]"):
        return EventKind.INPUT_VECTOR
    if text == "[initialize]":
        return EventKind.INIT_MARKER
    if text == "[BEGIN IF]":
        return EventKind.BEGIN_IF
    if text == "[END IF]":
        return EventKind.END_IF
    if text == "->":
        return EventKind.ARROW
    return EventKind.VALUE


def iter_events(lines: Iterable[str]) -> Iterator[TraceEvent]:
    for number, raw in enumerate(lines, start=1):
        kind = classify_line(raw)
        if kind is not None:
            yield TraceEvent(kind, raw.strip(), number)


_INPUT_PAIR_RE = re.compile(r"\(\s*'([^']*)'\s*,\s*(-?\d+)\s*\)")


def _parse_input_vector(event: TraceEvent, diagnostics: TraceDiagnostics) -> list[tuple[str, int]]:
    pairs = _INPUT_PAIR_RE.findall(event.text)
    if not pairs:
        diagnostics.warning(event.line_number,
                            f"input vector with no readable pairs: {event.text}")
    return [(name, int(value)) for name, value in pairs]


def normalize_value(token: str, keep_prefix: bool = False) -> str:
    """Strip a dotted prefix (``TelloState.LEFT`` -> ``LEFT``)."""
    if keep_prefix or "." not in token:
        return token
    stripped = token.rsplit(".", 1)[1]
    return stripped if stripped else token


def iter_sequences(
    lines: Iterable[str],
    *,
    keep_prefix: bool = False,
    diagnostics: Optional[TraceDiagnostics] = None,
) -> Iterator[ExecutionSequence]:
    """Stream execution sequences out of a line source.

    A sequence opens at each input-vector line (or implicitly at the first
    non-header content) and closes at the next input vector or at end of
    input.  Malformed constructs are reported through ``diagnostics`` and
    skipped; parsing itself never raises.
    """
    diag = diagnostics if diagnostics is not None else TraceDiagnostics()
    current: Optional[ExecutionSequence] = None
    depth = 0
    prev_value: Optional[str] = None      # value of the immediately preceding event
    arrow_pending: Optional[tuple[str, int]] = None  # (source, arrow line)
    init_pending = False

    def flush() -> Optional[ExecutionSequence]:
        nonlocal current, depth, prev_value, arrow_pending, init_pending
        if arrow_pending is not None:
            diag.error(arrow_pending[1], "arrow with no following value line")
        done = current
        if done is not None and depth != 0:
            diag.warning(last_line, f"unbalanced branch markers (depth {depth})")
        current = None
        depth = 0
        prev_value = None
        arrow_pending = None
        init_pending = False
        return done

    last_line = 0
    for event in iter_events(lines):
        last_line = event.line_number

        if event.kind == EventKind.INPUT_VECTOR:
            finished = flush()
            if finished is not None:
                yield finished
            current = ExecutionSequence(inputs=_parse_input_vector(event, diag))
            continue

        if event.kind == EventKind.HEADER:
            # headers only delimit exploration banners; they reset adjacency
            if arrow_pending is not None:
                diag.error(arrow_pending[1], "arrow with no following value line")
                arrow_pending = None
            prev_value = None
            init_pending = False
            continue

        if current is None:
            current = ExecutionSequence()

        if event.kind == EventKind.VALUE:
            value = normalize_value(event.text, keep_prefix)
            if not value:
                diag.warning(event.line_number, f"empty value token: {event.text!r}")
                continue
            if arrow_pending is not None:
                source, arrow_line = arrow_pending
                current.transitions.append(TransitionRecord(source, value, arrow_line))
                arrow_pending = None
            if init_pending:
                current.initial_observations.append(value)
                init_pending = False
            prev_value = value
            continue

        if event.kind == EventKind.ARROW:
            if arrow_pending is not None:
                diag.error(arrow_pending[1], "arrow with no following value line")
                arrow_pending = None
            if prev_value is None:
                diag.error(event.line_number, "arrow with no preceding value line")
            else:
                arrow_pending = (prev_value, event.line_number)
            prev_value = None
            continue

        # marker events: they break value adjacency
        if arrow_pending is not None:
            diag.error(arrow_pending[1], "arrow with no following value line")
            arrow_pending = None
        prev_value = None

        if event.kind == EventKind.INIT_MARKER:
            init_pending = True
        elif event.kind == EventKind.BEGIN_IF:
            init_pending = False
            depth += 1
        elif event.kind == EventKind.END_IF:
            init_pending = False
            if depth == 0:
                diag.warning(event.line_number, "END IF without matching BEGIN IF")
            else:
                depth -= 1

    finished = flush()
    if finished is not None:
        yield finished


def parse_trace(
    source: Iterable[str] | str,
    *,
    keep_prefix: bool = False,
    diagnostics: Optional[TraceDiagnostics] = None,
) -> list[ExecutionSequence]:
    """Parse a whole trace into a list of execution sequences.

    ``source`` may be an open text stream, any iterable of lines, or a
    string (split on newlines).
    """
    lines = source.splitlines() if isinstance(source, str) else source
    return list(iter_sequences(lines, keep_prefix=keep_prefix, diagnostics=diagnostics))


# -- model construction -------------------------------------------------------

@dataclass(frozen=True)
class BuilderStats:
    states: int
    transitions: int


class BuilderFinishedError(RuntimeError):
    pass


class ModelBuilder:
    """Incremental Kripke construction from execution sequences.

    Single-owner: not thread-safe.  Every observed state s gets the label
    atom ``var=s``.  Initial states are the union of initial observations.
    """

    def __init__(self, var: str = "current_state"):
        self._var = var
        self._states: set[str] = set()
        self._transitions: set[tuple[str, str]] = set()
        self._labeling: dict[str, frozenset[Atom]] = {}
        self._initial: set[str] = set()
        self._finished = False

    @property
    def var(self) -> str:
        return self._var

    def _add_state(self, state: str) -> None:
        if state not in self._states:
            self._states.add(state)
            self._labeling[state] = frozenset({Atom(value=state, variable=self._var)})

    def add_sequence(self, sequence: ExecutionSequence) -> BuilderStats:
        if self._finished:
            raise BuilderFinishedError("builder already finished")
        for state in sequence.initial_observations:
            self._add_state(state)
            self._initial.add(state)
        for record in sequence.transitions:
            self._add_state(record.source)
            self._add_state(record.target)
            self._transitions.add((record.source, record.target))
        return BuilderStats(len(self._states), len(self._transitions))

    def snapshot(self) -> KripkeStructure:
        return KripkeStructure(
            states=frozenset(self._states),
            transitions=frozenset(self._transitions),
            labeling=dict(self._labeling),
            initial=frozenset(self._initial),
        )

    def set_initial(self, states: Iterable[str]) -> None:
        """Replace the initial-state set; unseen states are added."""
        override = set(states)
        for s in override:
            self._add_state(s)
        self._initial = override

    def finish(self) -> KripkeStructure:
        self._finished = True
        return self.snapshot()


def build_model(
    sequences: Iterable[ExecutionSequence],
    *,
    var: str = "current_state",
    initial_override: Optional[Iterable[str]] = None,
) -> KripkeStructure:
    """Batch construction: fold all sequences through a fresh builder."""
    builder = ModelBuilder(var=var)
    for seq in sequences:
        builder.add_sequence(seq)
    if initial_override is not None:
        builder.set_initial(initial_override)
    return builder.finish()
