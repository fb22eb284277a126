"""Turn a class method into a standalone traced function plus a driver
that exercises it over every configured input combination."""

from .driver import generate_driver
from .transform import (
    ExtractionConfig,
    InstrumenterError,
    TransformReport,
    deactivate_calls,
    extract_function,
    insert_markers,
)

__all__ = [
    "ExtractionConfig",
    "InstrumenterError",
    "TransformReport",
    "deactivate_calls",
    "extract_function",
    "generate_driver",
    "insert_markers",
]

__version__ = "0.1.0"
