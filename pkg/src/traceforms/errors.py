"""Exception types shared across the package."""


class TraceFormsError(Exception):
    """Base class for all errors raised by traceforms."""


class SizeLimitError(TraceFormsError, ValueError):
    """A computation would exceed a configured size cap."""


class SizeMismatchError(TraceFormsError, ValueError):
    """Operands live over different matrix sizes or permutation degrees."""


class ParseError(TraceFormsError, ValueError):
    """Malformed text or structured input."""


class BidegreeError(TraceFormsError, ValueError):
    """A form is not homogeneous of the required bidegree."""


class BasisMismatchError(TraceFormsError, ValueError):
    """Sparse vectors were built over different monomial bases."""


class SingularMatrixError(TraceFormsError, ValueError):
    """A matrix that must be invertible is singular."""
