"""Exception hierarchy.

Numerical refusals (the pencil is not regular, a point lies on the spectrum,
an initial value is inconsistent) derive from :class:`NumericalRefusal`; the
CLI maps those to exit code 2.
"""


class DaeError(Exception):
    """Base class for all errors raised by :mod:`regdae`."""


class NonSquare(DaeError, ValueError):
    pass


class DimensionMismatch(DaeError, ValueError):
    pass


class BadRank(DaeError, ValueError):
    pass


class InvalidGrid(DaeError, ValueError):
    pass


class ParseError(DaeError, ValueError):
    pass


class NumericalRefusal(DaeError):
    """The input is well-formed but the requested operation is not defined for it."""


class DegenerateTolerance(NumericalRefusal):
    """Rank cutoff falls inside a singular-value cluster."""


class NotRegular(NumericalRefusal):
    pass


class SpectrumHit(NumericalRefusal):
    pass


class InconsistentInitialValue(NumericalRefusal):
    pass


class SpectrumTooCloseToAxis(NumericalRefusal):
    pass


class NoDichotomy(NumericalRefusal):
    pass


class RhoTooSmall(NumericalRefusal):
    pass


class NonConvergent(NumericalRefusal):
    pass


class Overflow(NumericalRefusal, OverflowError):
    pass


class InternalInconsistency(DaeError, RuntimeError):
    """Two independent routes to the same quantity disagree."""
