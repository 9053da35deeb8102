from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.linalg

from .errors import BadShape, DimMismatch, EmptyFrequencySet, InvalidFrequency


@dataclass(frozen=True)
class SymToeplitz:
    """Real symmetric Toeplitz matrix stored as its first column."""

    first_column: np.ndarray

    def __post_init__(self) -> None:
        column = np.asarray(self.first_column, dtype=float).reshape(-1)
        if column.size == 0:
            raise BadShape("Toeplitz matrix needs at least one entry")
        object.__setattr__(self, "first_column", column)

    @property
    def d(self) -> int:
        return int(self.first_column.size)

    def entry(self, i: int, j: int) -> float:
        return float(self.first_column[abs(i - j)])

    def dense(self) -> np.ndarray:
        return scipy.linalg.toeplitz(self.first_column)

    def scaled(self, factor: float) -> SymToeplitz:
        return SymToeplitz(self.first_column * factor)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(weight_vector(self.d) * self.first_column))


@dataclass(frozen=True)
class FrequencySet:
    freqs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        values = np.asarray(self.freqs, dtype=float).reshape(-1)
        if values.size and (np.any(values <= 0.0) or np.any(values >= 0.5)):
            raise InvalidFrequency("frequencies must lie strictly between 0 and 1/2")
        if values.size > 1 and np.any(np.diff(values) <= 0.0):
            raise InvalidFrequency("frequencies must be strictly increasing")
        object.__setattr__(self, "freqs", values)

    def __len__(self) -> int:
        return int(self.freqs.size)

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(float(f) for f in self.freqs)


@dataclass(frozen=True)
class FourierFactor:
    """Frequencies in (0, 1/2) with one weight per conjugate pair f, -f."""

    d: int
    freqs: FrequencySet
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.d < 1:
            raise BadShape("dimension must be positive")
        if not isinstance(self.freqs, FrequencySet):
            object.__setattr__(self, "freqs", FrequencySet(np.asarray(self.freqs, dtype=float)))
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if weights.size != len(self.freqs):
            raise DimMismatch("one weight is required per frequency")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def zero(cls, d: int) -> FourierFactor:
        return cls(d=d, freqs=FrequencySet(), weights=np.zeros(0))

    @classmethod
    def from_pairs(cls, d: int, pairs: Iterable[tuple[float, float]], tol: float = 0.0) -> FourierFactor:
        """Build a factor from (frequency, weight) pairs, summing weights of
        frequencies closer than ``tol``."""
        merged: list[list[float]] = []
        for freq, weight in sorted(pairs):
            if merged and freq - merged[-1][0] <= tol:
                merged[-1][1] += weight
            else:
                merged.append([freq, weight])
        if not merged:
            return cls.zero(d)
        return cls(
            d=d,
            freqs=FrequencySet(np.array([item[0] for item in merged])),
            weights=np.array([item[1] for item in merged]),
        )

    def __len__(self) -> int:
        return len(self.freqs)

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.freqs.as_tuple(), (float(a) for a in self.weights)))

    def total_weight(self) -> float:
        return float(self.weights.sum())


def _freq_array(S: FrequencySet | Iterable[float]) -> np.ndarray:
    if isinstance(S, FrequencySet):
        return S.freqs
    return np.asarray(list(S), dtype=float).reshape(-1)


def frequency_vector(f: float, d: int) -> np.ndarray:
    t = np.arange(d)
    return np.exp(2j * np.pi * math.fmod(f, 1.0) * t)


def build_symmetric_fourier(S: FrequencySet | Iterable[float], d: int) -> np.ndarray:
    freqs = _freq_array(S)
    if freqs.size == 0:
        raise EmptyFrequencySet("symmetric Fourier matrix needs at least one frequency")
    t = np.arange(d)[:, None]
    signed = np.concatenate([freqs, -freqs])[None, :]
    return np.exp(2j * np.pi * t * signed)


def collapse_matrix(s: int) -> np.ndarray:
    """The 2s x s matrix stacking two identities, folding f and -f together."""
    eye = np.eye(s)
    return np.vstack([eye, eye])


def real_collapsed_fourier(S: FrequencySet | Iterable[float], d: int) -> np.ndarray:
    freqs = _freq_array(S)
    if freqs.size == 0:
        raise EmptyFrequencySet("collapsed Fourier matrix needs at least one frequency")
    return _cosine_columns(np.arange(d), freqs)


def _cosine_columns(lags: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    return 2.0 * np.cos(2.0 * np.pi * np.outer(lags, freqs))


def factor_column_at(factor: FourierFactor, lags: np.ndarray) -> np.ndarray:
    """First-column values of the factor's induced matrix at the given lags."""
    lags = np.asarray(lags)
    if len(factor) == 0:
        return np.zeros(lags.shape, dtype=float)
    return _cosine_columns(lags, factor.freqs.freqs) @ factor.weights


def vandermonde_synthesize(factor: FourierFactor) -> SymToeplitz:
    return SymToeplitz(factor_column_at(factor, np.arange(factor.d)))


def weight_vector(d: int) -> np.ndarray:
    if d < 1:
        raise BadShape("dimension must be positive")
    w = np.sqrt(2.0 * (d - np.arange(d)))
    w[0] = math.sqrt(d)
    return w


def frobenius_via_weighted_column(A: SymToeplitz, B: SymToeplitz) -> float:
    if A.d != B.d:
        raise DimMismatch(f"dimension mismatch: {A.d} vs {B.d}")
    return float(np.linalg.norm(weight_vector(A.d) * (A.first_column - B.first_column)))


def wrap_distance(f: float, g: float) -> float:
    delta = abs(f - g) % 1.0
    return min(delta, 1.0 - delta)


def inner_product_magnitude(f: float, g: float, d: int) -> float:
    delta = wrap_distance(f, g)
    denominator = math.sin(math.pi * delta)
    if delta == 0.0 or abs(denominator) < 1e-15:
        return float(d)
    return abs(math.sin(math.pi * delta * d) / denominator)
