"""Exception hierarchy shared by every cohsim module."""

from __future__ import annotations


class CohsimError(Exception):
    """Base class for all errors raised by cohsim."""

    position: int | None = None


class DimensionMismatch(CohsimError, ValueError):
    pass


class IndexOutOfRange(CohsimError, IndexError):
    pass


class NotHermitian(CohsimError, ValueError):
    pass


class InvalidDistribution(CohsimError, ValueError):
    pass


class InvalidState(CohsimError, ValueError):
    pass


class MixedDimensions(CohsimError, ValueError):
    pass


class NonUnitaryGate(CohsimError, ValueError):
    pass


class EmptyProfile(CohsimError, ValueError):
    pass


class InvalidSize(CohsimError, ValueError):
    pass


class SizeMismatch(CohsimError, ValueError):
    pass


class InvalidWernerParameter(CohsimError, ValueError):
    pass


class LayerOutOfRange(CohsimError, IndexError):
    pass


class TooLarge(CohsimError, ValueError):
    pass


class InvalidParams(CohsimError, ValueError):
    pass


class InvalidRange(CohsimError, ValueError):
    pass
