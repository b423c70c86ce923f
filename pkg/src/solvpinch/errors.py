"""Exception and warning types shared by all modules."""


class SolvPinchError(Exception):
    """Base class for library errors."""


class MalformedInputError(SolvPinchError, ValueError):
    """Input arrays or JSON documents have the wrong shape or violate a bracket axiom."""


class FlatMetricError(SolvPinchError, ArithmeticError):
    """The metric is flat, so scal^2/|Ric|^2 is undefined."""


class PreconditionError(SolvPinchError, ValueError):
    """An operation was called outside the domain where its formula is valid."""


class DegenerateError(SolvPinchError, ArithmeticError):
    """A normalisation divides by a quantity that vanishes for this input."""


class RankAmbiguityWarning(UserWarning):
    """A singular value sits close to the rank-decision threshold."""
