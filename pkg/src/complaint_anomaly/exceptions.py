"""Exception hierarchy shared by every stage of the pipeline."""


class ComplaintAnomalyError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ComplaintAnomalyError, ValueError):
    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class ConfigurationError(ComplaintAnomalyError, ValueError):
    pass


class IngestionError(ComplaintAnomalyError, ValueError):
    pass


class LexiconLoadError(ComplaintAnomalyError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UndefinedWordError(ComplaintAnomalyError, KeyError):
    """Raised when a word does not occur in any document of the corpus."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DegenerateModelError(ComplaintAnomalyError, ValueError):
    pass


class InsufficientDataError(ComplaintAnomalyError, ValueError):
    pass


class DegenerateSequenceError(ComplaintAnomalyError, ValueError):
    pass


class DomainError(ComplaintAnomalyError, ValueError):
    pass


class StageOrderError(ComplaintAnomalyError, RuntimeError):
    """A pipeline command was run before the artifact it needs exists."""
