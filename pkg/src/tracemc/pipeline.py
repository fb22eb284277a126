"""Concurrent trace ingestion.

Producer threads parse trace sources (files, stdin, or a child process)
into execution sequences and feed them through a bounded queue to a single
consumer thread that owns the model builder.  Set semantics in the builder
make the resulting structure independent of arrival order, so any worker
count yields the same model.
"""

from __future__ import annotations

import shlex
import subprocess
import sys
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .formula import Formula
from .kripke import KripkeStructure, close_deadlocks
from .mc import VerificationResult, check
from .tracemodel import ExecutionSequence, ModelBuilder, TraceDiagnostics, iter_sequences


class QueueClosed(Exception):
    """put() after close, or get() on a closed and drained queue."""


class SequenceQueue:
    """Bounded multi-producer single-consumer queue with explicit close."""

    def __init__(self, capacity: int = 1024):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self._capacity = capacity
        self._items: deque = deque()
        self._closed = False
        self._cond = threading.Condition()

    def put(self, item) -> None:
        with self._cond:
            while len(self._items) >= self._capacity and not self._closed:
                self._cond.wait()
            if self._closed:
                raise QueueClosed("queue is closed")
            self._items.append(item)
            self._cond.notify_all()

    def get(self):
        with self._cond:
            while not self._items and not self._closed:
                self._cond.wait()
            if self._items:
                item = self._items.popleft()
                self._cond.notify_all()
                return item
            raise QueueClosed("queue is closed and drained")

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()


class SourceOpenError(Exception):
    """No trace source could be opened."""


@dataclass(frozen=True)
class TraceSource:
    kind: str  # "file" | "stdin" | "command"
    spec: str

    @property
    def name(self) -> str:
        return "<stdin>" if self.kind == "stdin" else self.spec


def file_source(path: str) -> TraceSource:
    return TraceSource("file", path)


def stdin_source() -> TraceSource:
    return TraceSource("stdin", "-")


def command_source(command_line: str) -> TraceSource:
    return TraceSource("command", command_line)


@dataclass(frozen=True)
class SourceStats:
    name: str
    sequences: int
    transitions: int
    warnings: int
    errors: tuple[str, ...] = ()
    opened: bool = True


@dataclass(frozen=True)
class WallTimes:
    ingest_ms: float
    check_ms: float


@dataclass(frozen=True)
class PipelineOptions:
    var: str = "current_state"
    keep_prefix: bool = False
    initial_override: Optional[tuple[str, ...]] = None
    close_deadlocks: bool = False
    jobs: Optional[int] = None  # None: one worker per source, capped at 8
    queue_capacity: int = 1024
    witness: bool = False


@dataclass(frozen=True)
class PipelineReport:
    model: KripkeStructure
    results: tuple[VerificationResult, ...]
    sources: tuple[SourceStats, ...]
    times: WallTimes


@dataclass
class _SnapshotRequest:
    ready: threading.Event = field(default_factory=threading.Event)
    structure: Optional[KripkeStructure] = None


class PipelineRun:
    """One pipeline execution.  start() spawns the threads; snapshot() can
    be called while running; result() joins and produces the report."""

    def __init__(
        self,
        sources: Iterable[TraceSource],
        formulas: Iterable[Formula] = (),
        options: Optional[PipelineOptions] = None,
    ):
        self._sources = list(sources)
        self._formulas = list(formulas)
        self._options = options or PipelineOptions()
        self._queue = SequenceQueue(self._options.queue_capacity)
        self._builder = ModelBuilder(var=self._options.var)
        self._stats: dict[int, SourceStats] = {}
        self._lock = threading.Lock()
        self._next_source = 0
        self._live_producers = 0
        self._producers: list[threading.Thread] = []
        self._consumer: Optional[threading.Thread] = None
        self._report: Optional[PipelineReport] = None
        self._started_at = 0.0
        self._ingest_ms = 0.0

    # -- threads ---------------------------------------------------------

    def start(self) -> "PipelineRun":
        workers = self._options.jobs
        if workers is None:
            workers = min(len(self._sources), 8)
        workers = max(1, min(workers, max(1, len(self._sources))))
        self._live_producers = workers
        self._started_at = time.perf_counter()
        self._consumer = threading.Thread(target=self._consume, name="model-builder")
        self._consumer.start()
        for i in range(workers):
            t = threading.Thread(target=self._producer_loop, name=f"ingest-{i}")
            self._producers.append(t)
            t.start()
        if not self._sources:
            self._queue.close()
        return self

    def _producer_loop(self) -> None:
        while True:
            with self._lock:
                if self._next_source >= len(self._sources):
                    break
                index = self._next_source
                self._next_source += 1
            self._ingest(index)
        with self._lock:
            self._live_producers -= 1
            last = self._live_producers == 0
        if last:
            self._queue.close()

    def _ingest(self, index: int) -> None:
        source = self._sources[index]
        sequences = 0
        transitions = 0
        errors: list[str] = []
        diagnostics = TraceDiagnostics()
        opened = True
        process: Optional[subprocess.Popen] = None
        handle = None
        try:
            if source.kind == "file":
                handle = open(source.spec, encoding="utf-8", errors="replace")
                lines: Iterable[str] = handle
            elif source.kind == "stdin":
                lines = sys.stdin
            elif source.kind == "command":
                process = subprocess.Popen(
                    shlex.split(source.spec),
                    stdout=subprocess.PIPE,
                    text=True,
                    encoding="utf-8",
                    errors="replace",
                )
                assert process.stdout is not None
                lines = process.stdout
            else:
                raise ValueError(f"unknown source kind: {source.kind}")
        except (OSError, ValueError) as exc:
            errors.append(str(exc))
            opened = False
            lines = ()
        if opened:
            try:
                for seq in iter_sequences(
                    lines,
                    keep_prefix=self._options.keep_prefix,
                    diagnostics=diagnostics,
                ):
                    self._queue.put(seq)
                    sequences += 1
                    transitions += len(seq.transitions)
            finally:
                if handle is not None:
                    handle.close()
                if process is not None:
                    status = process.wait()
                    if status != 0:
                        errors.append(
                            f"trace command exited with status {status}; partial output kept"
                        )
        with self._lock:
            self._stats[index] = SourceStats(
                name=source.name,
                sequences=sequences,
                transitions=transitions,
                warnings=len(diagnostics.entries),
                errors=tuple(errors),
                opened=opened,
            )

    def _consume(self) -> None:
        while True:
            try:
                item = self._queue.get()
            except QueueClosed:
                break
            if isinstance(item, _SnapshotRequest):
                item.structure = self._builder.snapshot()
                item.ready.set()
                continue
            self._builder.add_sequence(item)
        self._ingest_ms = (time.perf_counter() - self._started_at) * 1000.0

    # -- interaction -------------------------------------------------------

    def snapshot(self) -> KripkeStructure:
        """Consistent structure snapshot while ingestion may be running."""
        request = _SnapshotRequest()
        try:
            self._queue.put(request)
        except QueueClosed:
            assert self._consumer is not None
            self._consumer.join()
            return self._builder.snapshot()
        request.ready.wait()
        assert request.structure is not None
        return request.structure

    def result(self) -> PipelineReport:
        if self._report is not None:
            return self._report
        for t in self._producers:
            t.join()
        assert self._consumer is not None
        self._consumer.join()

        ordered = tuple(self._stats[i] for i in sorted(self._stats))
        if self._sources and not any(s.opened for s in ordered):
            raise SourceOpenError(
                "no trace source could be opened: "
                + "; ".join(err for s in ordered for err in s.errors)
            )

        if self._options.initial_override is not None:
            self._builder.set_initial(self._options.initial_override)
        model = self._builder.finish()
        if self._options.close_deadlocks:
            model = close_deadlocks(model)

        check_start = time.perf_counter()
        results = tuple(
            check(model, f, want_witness=self._options.witness)
            for f in self._formulas
        )
        check_ms = (time.perf_counter() - check_start) * 1000.0

        self._report = PipelineReport(
            model=model,
            results=results,
            sources=ordered,
            times=WallTimes(ingest_ms=self._ingest_ms, check_ms=check_ms),
        )
        return self._report


def run_pipeline(
    sources: Iterable[TraceSource],
    formulas: Iterable[Formula] = (),
    options: Optional[PipelineOptions] = None,
) -> PipelineReport:
    """Ingest all sources, build the model, check the formulas."""
    return PipelineRun(sources, formulas, options).start().result()
