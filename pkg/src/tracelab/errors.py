"""Exception hierarchy shared by every tracelab module."""


class TracelabError(ValueError):
    """Base class for domain errors raised by tracelab."""


class NotHermitian(TracelabError):
    pass


class NotPositive(TracelabError):
    pass


class NoConvergence(TracelabError):
    pass


class SingularPower(TracelabError):
    """A negative or fractional power was requested of a (numerically) singular matrix."""


class BadExponent(TracelabError):
    pass


class DimMismatch(TracelabError):
    pass


class NotUnitary(TracelabError):
    pass


class BadWeights(TracelabError):
    pass


class BadPartition(TracelabError):
    pass


class DomainViolation(TracelabError):
    pass


class NonUnitalChannel(TracelabError):
    pass


class SearchExhausted(TracelabError):
    """Raised when a counterexample search spends its budget without a verified witness.

    The best (unverified or sub-threshold) candidate is kept on ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
