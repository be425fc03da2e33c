"""Exception types shared across the package."""


class LenslabError(Exception):
    """Base class for all package-specific failures."""


class InvalidArgument(LenslabError, ValueError):
    """An operation was called outside its documented preconditions."""


class NumericalFailure(LenslabError, RuntimeError):
    """A computation produced non-finite values or left its stability range.

    Attributes
    ----------
    when : float or None
        Simulation time at which the failure was detected, if applicable.
    """

    def __init__(self, message, when=None):
        super().__init__(message)
        self.when = when


class DomainEscape(NumericalFailure):
    """State required evaluation outside the resolved spatial domain.

    Attributes
    ----------
    abscissa : float or None
        Largest offending |x| (or boundary-mass fraction for box runs).
    """

    def __init__(self, message, abscissa=None, when=None):
        super().__init__(message, when=when)
        self.abscissa = abscissa


class NotAbsolutelyContinuous(LenslabError, ValueError):
    """A discrete density was requested where mass sits on a null set."""
