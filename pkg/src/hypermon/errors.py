"""Exception hierarchy shared across the package."""


class MonitorError(Exception):
    """Base class for all errors raised by this package."""


class FormulaSyntaxError(MonitorError):
    """Specification text does not conform to the grammar."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self) -> str:
        if self.line:
            return f"line {self.line}, column {self.column}: {self.message}"
        return self.message


class UnboundVariableError(FormulaSyntaxError):
    """An atom references a trace variable not bound by the prefix."""


class DuplicateBinderError(FormulaSyntaxError):
    """A trace variable is bound more than once in the prefix."""


class UncoveredVariableError(MonitorError):
    """Evaluation requested for a variable missing from the assignment."""


class SupportMismatchError(MonitorError):
    """Two automata (or a formula and a declared support) disagree on the alphabet."""


class ResourceLimitError(MonitorError):
    """A state-count or alphabet-size guard was exceeded."""


class FragmentError(MonitorError):
    """Operation not defined for this quantifier prefix shape."""


class TraceFormatError(MonitorError):
    """A trace file does not conform to the trace format."""


class CircuitInputError(MonitorError):
    """Circuit stepping or property generation got unknown/missing bit names."""
