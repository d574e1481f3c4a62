"""Exception types shared across the workbench."""


class GraphAlgError(Exception):
    """Base class for all workbench errors."""


class DuplicateName(GraphAlgError):
    pass


class UnknownSymbol(GraphAlgError):
    pass


class ArityMismatch(GraphAlgError):
    pass


class NotInjective(GraphAlgError):
    pass


class RangeError(GraphAlgError):
    pass


class ZeroArity(GraphAlgError):
    pass


class TooLarge(GraphAlgError):
    pass


class MissingVariable(GraphAlgError):
    pass


class InvalidDerivation(GraphAlgError):
    pass


class VocabularyMismatch(GraphAlgError):
    pass


class ConstantViolatesRestriction(GraphAlgError):
    pass


class NotACongruence(GraphAlgError):
    """Raised when a candidate equivalence fails compatibility; carries a counterexample."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class ParseError(GraphAlgError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column
