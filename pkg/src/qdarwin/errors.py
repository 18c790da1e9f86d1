"""Exception hierarchy.  Everything raised on bad input derives from QDarwinError."""


class QDarwinError(Exception):
    pass


class EmptyInput(QDarwinError, ValueError):
    pass


class DimensionMismatch(QDarwinError, ValueError):
    pass


class NotUnitary(QDarwinError, ValueError):
    pass


class InvalidIndices(QDarwinError, ValueError):
    pass


class LayoutMismatch(QDarwinError, ValueError):
    pass


class InvalidLayout(QDarwinError, ValueError):
    pass


class NotNormalized(QDarwinError, ValueError):
    pass


class CapacityExceeded(QDarwinError):
    pass


class InvalidDensity(QDarwinError, ValueError):
    pass


class InfeasibleOverlap(QDarwinError, ValueError):
    pass


class TooFewSubsystems(QDarwinError, ValueError):
    pass


class OverlappingParts(QDarwinError, ValueError):
    pass


class DegenerateSystem(QDarwinError):
    """Redundancy is undefined when the system carries no entropy."""


class NeverReached(QDarwinError):
    pass


class TooFewSizes(QDarwinError, ValueError):
    pass


class NoCommonEigenbasis(QDarwinError):
    pass


class InvalidLabels(QDarwinError, ValueError):
    pass


class WrongSupport(QDarwinError, ValueError):
    pass


class ToleranceUnreachable(QDarwinError):
    pass


class FoundationsViolation(QDarwinError):
    """An internal consistency check on a constructed state failed."""
