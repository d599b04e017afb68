"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """A stated precondition of an operation does not hold."""


class DimensionMismatchError(PreconditionError):
    """Operands live on different domains."""


class BudgetExceededError(RuntimeError):
    """An enumeration, complexity, or time budget was exhausted.

    ``partial`` carries whatever certificate material was built before the
    budget ran out, so callers can inspect how far the run got.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CertificateError(RuntimeError):
    """A produced certificate failed its own re-verification."""


class MajorantViolationError(PreconditionError):
    """A queried factor pushed the majorant's conditional expectation above 1 + eta."""

    def __init__(self, message, members=None, linf=None):
        super().__init__(message)
        self.members = tuple(members) if members is not None else ()
        self.linf = linf
