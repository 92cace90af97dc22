"""
Domain exceptions for risynth.

Every error raised by the library derives from ``RisynthError`` so callers
(the CLI in particular) can separate expected validation failures from
unexpected runtime faults.
"""

from typing import Optional


class RisynthError(Exception):
    """Base class for all risynth errors"""


class DomainError(RisynthError, ValueError):
    """A value lies outside the domain of an operation"""


class FrequencyRangeError(DomainError):
    """Requested frequency is outside the stored table grid (no extrapolation)"""


class UnknownStateError(RisynthError, KeyError):
    """A state name is not bound to the unit-cell table"""

    def __init__(self, state: str, available: tuple = ()):
        self.state = state
        self.available = tuple(available)
        super().__init__(state)

    def __str__(self) -> str:
        known = ", ".join(self.available) if self.available else "none"
        return f"Unknown unit-cell state '{self.state}' (known states: {known})"


class KindMismatchError(RisynthError):
    """A reflective table was given where a transmissive one is required, or vice versa"""


class StateTableError(RisynthError):
    """Base class for state-table parse and validation errors"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class StateTableSchemaError(StateTableError):
    """Header, column or directive does not match the CSV schema"""


class NonMonotoneFrequencyError(StateTableError):
    """Frequencies of a state are not strictly increasing"""


class MismatchedGridError(StateTableError):
    """States were sampled on different frequency grids"""


class PassivityError(StateTableError):
    """|coefficient| > 1 in a table that is not flagged active"""


class StateTableTooSmallError(StateTableError):
    """Fewer than two states"""


class ScenarioValidationError(RisynthError):
    """Scenario file failed validation"""

    def __init__(self, message: str, field_path: str = "", line: Optional[int] = None):
        self.field_path = field_path
        self.line = line
        self.message = message
        where = field_path or "<scenario>"
        if line is not None:
            where = f"{where} (line {line})"
        super().__init__(f"{where}: {message}")
