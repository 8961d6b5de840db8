"""Exception types raised across the package."""


class PartialColorError(Exception):
    """Base class for all package errors."""


class MalformedInput(PartialColorError, ValueError):
    pass


class MalformedColoring(MalformedInput):
    pass


class MalformedEdge(MalformedInput):
    pass


class MalformedInstance(MalformedInput):
    pass


class InvalidParameters(PartialColorError, ValueError):
    pass


class InvalidSplit(InvalidParameters):
    pass


class UndefinedGadget(InvalidParameters):
    pass


class BudgetExceeded(PartialColorError):
    pass


class SolverFailure(PartialColorError):
    """No solution found; ``outcome`` holds the solver's SolveOutcome."""

    def __init__(self, message, outcome=None):
        super().__init__(message)
        self.outcome = outcome


class InvalidColoring(PartialColorError):
    """A coloring broke a promise the caller relied on (e.g. while decoding)."""


class ParseError(MalformedInput):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
