"""Exception hierarchy shared across the package."""


class TwinbeamError(Exception):
    """Base class for all errors raised by twinbeam."""


class ValidationError(TwinbeamError, ValueError):
    """An input failed a precondition (shape, range, or invariant check)."""


class PhysicalityError(ValidationError):
    """A state or channel violates the uncertainty / complete-positivity bound."""


class ModeLookupError(TwinbeamError, LookupError):
    """A mode label is not present in the state it was addressed on."""


class MeasurementUndefinedError(TwinbeamError):
    """The requested measurement has no defined reference (e.g. zero-SQL)."""


class ResourceBudgetError(TwinbeamError):
    """A construction would exceed the configured mode budget."""


class IntegrityError(TwinbeamError):
    """An output manifest disagrees with what is actually on disk."""


class PgmFormatError(TwinbeamError, ValueError):
    """A PGM file could not be parsed; carries line/column context."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ConfigError(TwinbeamError):
    """A scenario configuration is invalid; carries the offending key path."""

    def __init__(self, message: str, key_path: str | None = None):
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)
        self.key_path = key_path
