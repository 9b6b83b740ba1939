"""Exception hierarchy.

Every domain error derives from :class:`DgError`; the CLI reports the class
name of the raised error verbatim.
"""


class DgError(Exception):
    """Base class for all domain errors."""


# algebra
class AlgebraError(DgError):
    pass


class P1Violation(AlgebraError):
    pass


class P2Violation(AlgebraError):
    pass


class P3Violation(AlgebraError):
    pass


class AssocViolation(AlgebraError):
    pass


class LeibnizViolation(AlgebraError):
    pass


class DSquareViolation(DgError):
    pass


class CapInconsistent(AlgebraError):
    pass


class CapExceeded(DgError):
    pass


class VertexMismatch(DgError):
    pass


class InconsistentRelation(AlgebraError):
    pass


# modules and maps
class DegreeMismatch(DgError):
    pass


class NotFilterable(DgError):
    pass


class NotDgFlag(DgError):
    pass


class NotInjective(DgError):
    pass


class MissingSimple(DgError):
    pass


class NotIdempotent(DgError):
    pass


class UnsupportedCharacteristic(DgError):
    pass


class UnsupportedField(DgError):
    pass


# koszul
class NonzeroDerivation(DgError):
    pass


class DegreeCapExceeded(DgError):
    pass


class NotKoszul(DgError):
    pass


class InfiniteResolution(DgError):
    pass


class VerificationFailed(DgError):
    pass


# io
class ParseError(DgError):
    def __init__(self, message, path=()):
        self.path = tuple(path)
        where = "/".join(str(p) for p in self.path) or "<root>"
        super().__init__(f"{where}: {message}")


class ValidationError(DgError):
    """Wraps a validator error raised while loading a document."""

    def __init__(self, cause):
        self.cause = cause
        super().__init__(f"{type(cause).__name__}: {cause}")
