from __future__ import annotations


class TsketchError(ValueError):
    """Base class for every error raised by tsketch."""


class EmptyFrequencySet(TsketchError):
    pass


class InvalidFrequency(TsketchError):
    pass


class DimMismatch(TsketchError):
    pass


class NonFiniteInput(TsketchError):
    pass


class BadRank(TsketchError):
    pass


class BadShape(TsketchError):
    pass


class TooLargeForBruteForce(TsketchError):
    pass


class NotClustered(TsketchError):
    pass


class IllConditionedGamma(TsketchError):
    pass


class NotHermitian(TsketchError):
    pass


class ExplosionGuard(TsketchError):
    """Exhaustive candidate enumeration would exceed the configured limit."""
