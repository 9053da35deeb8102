from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import DimMismatch
from .toeplitz import SymToeplitz

logger = logging.getLogger(__name__)

LagSource = SymToeplitz | Callable[[int], float]


@dataclass
class QueryLedger:
    read_lags: set[int] = field(default_factory=set)
    total_reads: int = 0

    def record(self, lags: Iterable[int]) -> None:
        for lag in lags:
            self.read_lags.add(int(lag))
            self.total_reads += 1

    @property
    def distinct_lags(self) -> int:
        return len(self.read_lags)


class LagClient:
    """Query access to the first column of a symmetric Toeplitz matrix.

    Every value handed out goes through ``read`` so the ledger is an exact
    record of the lags the caller has seen.
    """

    def __init__(self, source: LagSource, d: int | None = None) -> None:
        if isinstance(source, SymToeplitz):
            column = source.first_column
            self._fetch: Callable[[int], float] = lambda lag: float(column[lag])
            self.d = source.d
        else:
            if d is None:
                raise DimMismatch("dimension is required for callable lag sources")
            self._fetch = source
            self.d = d
        self.ledger = QueryLedger()
        self._cache: dict[int, float] = {}

    def _request(self, lag: int) -> float:
        if not 0 <= lag < self.d:
            raise DimMismatch(f"lag {lag} outside [0, {self.d})")
        if lag not in self._cache:
            self._cache[lag] = float(self._fetch(lag))
        return self._cache[lag]

    def read(self, lags: Iterable[int]) -> np.ndarray:
        """Values at the requested lags; each distinct lag of a call counts as one read."""
        lags = np.asarray(list(lags), dtype=int)
        unique = np.unique(lags)
        values = {int(lag): self._request(int(lag)) for lag in unique}
        self.ledger.record(unique)
        logger.debug("read %d lags (%d distinct overall)", unique.size, self.ledger.distinct_lags)
        return np.array([values[int(lag)] for lag in lags], dtype=float)
