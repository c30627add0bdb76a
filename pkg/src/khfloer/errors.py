"""Exception hierarchy shared by all modules.

Each error class carries the CLI exit code it maps to.
"""


class KhError(Exception):
    exit_code = 1


class ParseError(KhError, ValueError):
    """Malformed textual input (PD code, braid word, movie script, theory string)."""

    exit_code = 2


class MalformedDiagramError(ParseError):
    """An edge label occurs a number of times other than two."""


class OrientationError(ParseError):
    """Crossing data cannot be oriented consistently."""


class PreconditionError(KhError):
    """An operation was called on inputs that violate its precondition."""

    exit_code = 3


class SiteError(PreconditionError):
    """A move references edges or crossings that do not form a valid site."""


class InvalidPivotError(PreconditionError):
    """Cancellation requested along a zero coefficient."""


class ShapeError(PreconditionError, ValueError):
    """Matrix or map dimensions do not match."""


class IntegrityError(KhError):
    """A structural identity failed (d^2 != 0, non-chain map, axiom failure)."""

    exit_code = 4
