"""Exception types raised across the package."""


class LinkedGrassError(Exception):
    pass


class DivisionByZero(LinkedGrassError, ZeroDivisionError):
    pass


class NegativeValuation(LinkedGrassError, ValueError):
    """Specialization at s = 0 of an element with a pole at s = 0."""


class DimensionMismatch(LinkedGrassError, ValueError):
    pass


class NotFullRank(LinkedGrassError, ValueError):
    pass


class IndexOutOfRange(LinkedGrassError, IndexError):
    pass


class BadProfile(LinkedGrassError, ValueError):
    pass


class NotInvertible(LinkedGrassError, ValueError):
    pass


class UnitDeterminantRequired(LinkedGrassError, ValueError):
    pass


class DecompositionFailed(LinkedGrassError):
    pass


class NotLinked(LinkedGrassError):
    pass


class NotExact(LinkedGrassError):
    pass


class NotIsotropic(LinkedGrassError):
    pass


class GenerationExhausted(LinkedGrassError):
    def __init__(self, message, attempts=0, reasons=()):
        super().__init__(message)
        self.attempts = attempts
        self.reasons = tuple(reasons)


class InvalidConfig(LinkedGrassError, ValueError):
    pass


class SchemaError(LinkedGrassError, ValueError):
    """Malformed or inconsistent JSON input."""
