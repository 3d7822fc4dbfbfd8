"""Exception types shared across the package."""


class ShiftrecError(Exception):
    """Base class for package errors."""


class InsufficientDataError(ShiftrecError):
    """A bounded source was asked for bits beyond its data."""


class NoCertificateError(ShiftrecError):
    """A tail modulus could not certify the requested threshold."""


class BudgetExceededError(ShiftrecError):
    """An exhaustive enumeration would exceed the configured budget."""


class BoundViolationError(ShiftrecError):
    """A constructed certificate violates its own measure bound.

    This always indicates a construction bug (or a tampered certificate),
    never a legitimate run-time condition.
    """


class InapplicableBoundError(ShiftrecError):
    """The direct level-set bound does not apply; use the split path."""


class PrecisionError(ShiftrecError):
    """A circle comparison stayed undecidable at the maximum precision."""


class DepthExhaustedError(ShiftrecError):
    """The continued-fraction expansion ran out before certifying a return."""
