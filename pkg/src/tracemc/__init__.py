"""Model construction from execution traces and CTL* verification."""

from .formula import (
    Always,
    And,
    Atom,
    Classification,
    Eventually,
    Exists,
    FALSE,
    FalseLit,
    ForAll,
    Formula,
    FormulaSyntaxError,
    Implies,
    Next,
    Not,
    Or,
    Release,
    TRUE,
    TrueLit,
    Until,
    classify,
    is_ctl,
    normalize,
    parse_formula,
    pretty,
)
from .kripke import (
    KripkeStructure,
    PortableModelError,
    adjacency,
    close_deadlocks,
    export_dot,
    from_portable,
    to_portable,
    validate,
)
from .mc import (
    BuchiAutomaton,
    CheckError,
    Lasso,
    NonTotalStructure,
    NotAStateFormula,
    Product,
    QuantifierPresent,
    SatSet,
    VerificationResult,
    accepts_word,
    build_product,
    check,
    exists_accepting_run,
    ltl_to_buchi,
    sat_eg,
    sat_eu,
    sat_ex,
    sat_states,
)
from .pipeline import (
    PipelineOptions,
    PipelineReport,
    PipelineRun,
    SequenceQueue,
    SourceOpenError,
    SourceStats,
    TraceSource,
    command_source,
    file_source,
    run_pipeline,
    stdin_source,
)
from .tracemodel import (
    ExecutionSequence,
    ModelBuilder,
    TraceDiagnostics,
    TransitionRecord,
    build_model,
    classify_line,
    normalize_value,
    parse_trace,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
