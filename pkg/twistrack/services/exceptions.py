class ServiceError(Exception):
    """Base exception for twistrack failures."""

    def __init__(self, message: str, *, cause: Exception | None = None):
        super().__init__(message)
        self.cause = cause


class InvalidInput(ServiceError):
    """Raised when a text descriptor (element, matrix, signature) cannot be parsed."""


# finite fields
class NotPrime(ServiceError):
    pass


class EvenCharacteristic(ServiceError):
    pass


class Reducible(ServiceError):
    pass


class ZeroElement(ServiceError):
    pass


class FactorTooLarge(ServiceError):
    pass


class FieldOverflow(ServiceError):
    pass


# matrices and automorphisms
class Singular(ServiceError):
    pass


class UnsupportedKind(ServiceError):
    pass


class InternalInconsistency(ServiceError):
    """An invariant that holds by construction was observed to fail."""


class OrderNotCoprime(ServiceError):
    pass


class InvalidAutomorphism(ServiceError):
    pass


# racks
class BudgetExceeded(ServiceError):
    """Raised when an enumeration grows past its configured cap."""

    def __init__(self, message: str, limit: int | None = None, *, cause: Exception | None = None):
        super().__init__(message, cause=cause)
        self.limit = limit


class NotInvolution(ServiceError):
    pass


# Weyl group and tori
class InvalidSignature(ServiceError):
    pass


class TooLarge(ServiceError):
    pass


class ScaleTooLarge(ServiceError):
    pass


# classifier and constructions
class InvalidDescriptor(ServiceError):
    pass


class PreconditionViolated(ServiceError):
    pass


class CertificationFailed(ServiceError):
    """A construction that should certify did not; treated as a hard error."""


class HEven(ServiceError):
    pass
