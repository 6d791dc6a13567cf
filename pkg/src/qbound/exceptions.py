"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`QBoundError`
so the command line front end can map it to a one-line message and exit code 2.
"""


class QBoundError(Exception):
    """Base class for all package errors."""


class InvalidInputError(QBoundError, ValueError):
    """A matrix or parameter violates a documented precondition."""


class SingularSupportError(QBoundError, ValueError):
    """An operator has weight outside the support of the reference state."""


class DomainError(QBoundError, ValueError):
    """A parameter point lies outside the model domain."""


class TruncationError(QBoundError, ValueError):
    """A Fock truncation discards more weight than allowed."""


class InconsistentPovmError(QBoundError, ValueError):
    """Outcome probabilities of a measurement do not sum to one."""


class InadmissibleStepError(QBoundError, ValueError):
    """A finite difference step makes a closed-form bound ill defined."""
