"""Exception hierarchy shared across the workbench."""


class StatbenchError(Exception):
    """Base class for all workbench errors."""


class DataError(StatbenchError):
    """CSV parsing or dataset construction failure."""


class DomainError(StatbenchError):
    """A statistical routine was handed values outside its domain.

    Domain errors are expected user-facing conditions (degenerate variance,
    all-missing column, log of a nonpositive value).  They surface as error
    results in output panels and reports, never as crashes.
    """


class TemplateError(StatbenchError):
    """Code template and bindings disagree (missing or extra placeholder)."""


class ScriptSyntaxError(StatbenchError):
    """Script text violates the grammar.  Carries position information."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class ScriptEvalError(StatbenchError):
    """Structural replay failure: unknown command, bad arity, missing column.

    Unlike DomainError, this aborts script evaluation; it means the script
    no longer matches the data or the registry, not that a statistic is
    undefined.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ManifestError(StatbenchError):
    """Module manifest validation failure with a machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class EngineError(StatbenchError):
    """Reactive graph misuse (duplicate id, wrong node kind, and the like)."""


class CycleError(EngineError):
    """A reactive node transitively read itself."""

    def __init__(self, path: list[str]):
        super().__init__("dependency cycle: " + " -> ".join(path))
        self.path = list(path)


class SessionError(StatbenchError):
    """Session-level request failure (unknown input, nothing to store)."""
