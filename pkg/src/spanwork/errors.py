"""Exception hierarchy shared by every module."""


class SpanworkError(Exception):
    """Base class. ``exit_code`` is used by the command line front end."""

    exit_code = 3


class OutOfDomain(SpanworkError):
    pass


class BadParams(SpanworkError, ValueError):
    pass


class ArityMismatch(SpanworkError, ValueError):
    pass


class DomainTooLarge(SpanworkError):
    pass


class NotTrue(SpanworkError):
    pass


class NotFalse(SpanworkError):
    pass


class Singular(SpanworkError):
    pass


class EmptyFalseSet(SpanworkError):
    """Raised by canonicalization when f is identically 1.

    The ``trivial`` attribute holds the zero-target program that computes
    the constant-1 function.
    """

    def __init__(self, msg, trivial=None):
        super().__init__(msg)
        self.trivial = trivial


class NotClean(SpanworkError):
    pass


class NotOneSided(SpanworkError):
    pass


class DimensionTooLarge(SpanworkError):
    pass


class SizeCap(SpanworkError):
    pass


class NoConvergence(SpanworkError):
    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class InfeasibleGram(SpanworkError):
    pass


class NotCanonical(SpanworkError):
    pass


class CostMismatch(SpanworkError):
    pass


class NotSymmetric(SpanworkError):
    pass


class BadDistribution(SpanworkError):
    pass


class NotFound(SpanworkError):
    pass


class TooLarge(SpanworkError):
    pass


class BadKernelVector(SpanworkError):
    pass


class Disconnected(SpanworkError):
    pass


class NotNormalized(SpanworkError):
    pass


class HypothesisViolation(SpanworkError):
    pass


class InvalidAdversaryMatrix(SpanworkError):
    pass


class SchemaError(SpanworkError):
    exit_code = 2


class VerificationFailed(SpanworkError):
    exit_code = 4
