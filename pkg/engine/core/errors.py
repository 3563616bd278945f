"""Exception hierarchy shared by the engine, the ingestion layer and the CLI.

Each error belongs to one family; the CLI maps families to exit codes
(config -> 1, data -> 2, invariant -> 3).
"""

from typing import Optional


class PreferenceEngineError(Exception):
    """Base class for every error raised by this project."""

    exit_code = 2


# ---------------------------------------------------------------------------
# Config errors
# ---------------------------------------------------------------------------

class ConfigError(PreferenceEngineError):
    exit_code = 1


# ---------------------------------------------------------------------------
# Data errors
# ---------------------------------------------------------------------------

class DataError(PreferenceEngineError):
    exit_code = 2


class CycleError(DataError):
    """Closing a set of preference tuples produced (x, x) or both (x, y) and (y, x)."""


class UnknownValue(DataError):
    def __init__(self, attribute: str, value: object):
        super().__init__(f"Unknown value {value!r} for attribute {attribute!r}")
        self.attribute = attribute
        self.value = value


class AttributeMismatch(DataError):
    pass


class SchemaMismatch(DataError):
    pass


class UnreachableValue(DataError):
    pass


class DuplicateObjectError(DataError):
    def __init__(self, object_id: str):
        super().__init__(f"Object {object_id!r} already arrived in this stream")
        self.object_id = object_id


class ParseError(DataError):
    def __init__(self, message: str, *, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class SchemaViolation(DataError):
    def __init__(self, field: str, message: str, *, line: Optional[int] = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}: {message}{where}")
        self.field = field
        self.line = line


# ---------------------------------------------------------------------------
# Invariant errors
# ---------------------------------------------------------------------------

class InvariantViolation(PreferenceEngineError):
    exit_code = 3
