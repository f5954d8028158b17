"""Diagnostics and the error types shared by every pass."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Tuple


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


# Fixed code registry. Parser codes first, then the validator's checks,
# then operation-level failures.
SYNTAX = "SYNTAX"
DUPLICATE_NAME = "DUPLICATE_NAME"
UNKNOWN_ENTITY = "UNKNOWN_ENTITY"

DANGLING_REF = "DANGLING_REF"
ILLEGAL_INTRA_ADJACENCY = "ILLEGAL_INTRA_ADJACENCY"
ILLEGAL_INTER_FLOW = "ILLEGAL_INTER_FLOW"
SELF_FLOW = "SELF_FLOW"
REGION_NOT_SUBSET = "REGION_NOT_SUBSET"
UNDECLARED_EVENT = "UNDECLARED_EVENT"
CYCLIC_BEHAVIOR = "CYCLIC_BEHAVIOR"
EMPTY_REGION = "EMPTY_REGION"
SAME_MACHINE_TRIGGER = "SAME_MACHINE_TRIGGER"
TEMPORAL_ENTITY_ATTR = "TEMPORAL_ENTITY_ATTR"

UNSUPPORTED_ARITY = "UNSUPPORTED_ARITY"
NOT_VALIDATED = "NOT_VALIDATED"
MISSING_VIEW_DATA = "MISSING_VIEW_DATA"
EMPTY_TRACE = "EMPTY_TRACE"

VALIDATOR_CODES = (
    DANGLING_REF,
    ILLEGAL_INTRA_ADJACENCY,
    ILLEGAL_INTER_FLOW,
    SELF_FLOW,
    REGION_NOT_SUBSET,
    UNDECLARED_EVENT,
    CYCLIC_BEHAVIOR,
    EMPTY_REGION,
    SAME_MACHINE_TRIGGER,
)

CODES = frozenset(
    VALIDATOR_CODES
    + (
        SYNTAX,
        DUPLICATE_NAME,
        UNKNOWN_ENTITY,
        TEMPORAL_ENTITY_ATTR,
        UNSUPPORTED_ARITY,
        NOT_VALIDATED,
        MISSING_VIEW_DATA,
        EMPTY_TRACE,
    )
)

Location = Tuple[int, int]


@dataclass(frozen=True)
class Diagnostic:
    """A located message; line and column are 1-based."""

    severity: Severity
    code: str
    message: str
    line: int = 1
    column: int = 1

    def __post_init__(self) -> None:
        if self.code not in CODES:
            raise ValueError(f"unregistered diagnostic code {self.code!r}")

    @classmethod
    def error(cls, code: str, message: str, loc: Optional[Location] = None) -> "Diagnostic":
        line, col = loc or (1, 1)
        return cls(Severity.ERROR, code, message, line, col)

    @classmethod
    def warning(cls, code: str, message: str, loc: Optional[Location] = None) -> "Diagnostic":
        line, col = loc or (1, 1)
        return cls(Severity.WARNING, code, message, line, col)

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self) -> tuple:
        return (self.line, self.column, self.code, self.message)

    def render(self) -> str:
        return f"{self.severity.value} {self.code} at {self.line}:{self.column} — {self.message}"


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


class TMError(Exception):
    """An operation refused its input. ``code`` is drawn from the registry."""

    def __init__(self, code: str, message: str, diagnostics: Tuple[Diagnostic, ...] = ()):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.diagnostics = tuple(diagnostics)


class ParseError(TMError):
    """Source text could not be turned into a model."""

    def __init__(self, diagnostics: Iterable[Diagnostic]):
        diagnostics = tuple(diagnostics)
        first = diagnostics[0]
        super().__init__(first.code, first.message, diagnostics)
