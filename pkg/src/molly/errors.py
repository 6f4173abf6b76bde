"""Exception hierarchy shared by every module."""


class MollyError(Exception):
    """Base class for all library errors."""


class ValidationError(MollyError, ValueError):
    """Input that violates a documented precondition."""


class ComputationError(MollyError):
    """A well-formed input for which the requested object does not exist."""


# ffield
class NotPrime(ValidationError):
    pass


class DegreeTooLarge(ValidationError):
    pass


class KernelNotFound(ComputationError):
    pass


# perfring / valuation / series
class VariableCountMismatch(ValidationError):
    pass


class NotAMonomial(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ZeroDenominator(ValidationError):
    pass


class NonpositivePi(ValidationError):
    pass


class BoundOverflow(ComputationError):
    pass


# polygon
class EmptyFamily(ValidationError):
    pass


class WeightsNonpositive(ValidationError):
    pass


# np
class NonNegativeNP(ValidationError):
    pass


# mollify
class AlreadyOptimal(ValidationError):
    pass


class NotPDivisible(ComputationError):
    pass


class WeightsDependent(ValidationError):
    pass


class PiNotMonomial(ValidationError):
    pass


class DivisorObstruction(ComputationError):
    def __init__(self, index, certificate):
        super().__init__(f"divisor {index} carries a negative certificate (bound {certificate.bound})")
        self.index = index
        self.certificate = certificate


# lrr
class TooShort(ValidationError):
    pass


class RecurrenceViolated(ValidationError):
    pass


class RelationFails(ValidationError):
    pass


class TruncationTooShallow(ValidationError):
    pass
