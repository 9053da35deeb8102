from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BadShape, DimMismatch

logger = logging.getLogger(__name__)

RANK_CUTOFF = 1e-12


@dataclass
class LevBounds:
    d: int
    r: int
    tau: np.ndarray
    total: float
    c_cor: float = 1.0

    @property
    def constant(self) -> float:
        """total / (r log(r+1) log d), the constant in the row-budget bound."""
        return self.total / (self.r * math.log2(self.r + 1) * max(1.0, math.log2(self.d)))


@dataclass
class SamplingPlan:
    d: int
    m: int
    seed: int | None
    indices: np.ndarray
    probabilities: np.ndarray
    scales: np.ndarray

    def compressed(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Unique rows, the first draw of each and its combined scale sqrt(count / (m p))."""
        rows, first, counts = np.unique(self.indices, return_index=True, return_counts=True)
        return rows, first, self.scales[first] * np.sqrt(counts)


@dataclass
class EmbeddingReport:
    min_ratio: float
    max_ratio: float
    beta: float
    passed: bool


def exact_leverage_scores(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise BadShape("leverage scores need a non-empty 2-D matrix")
    Q, R, _ = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return np.zeros(A.shape[0])
    rank = int(np.sum(diag > RANK_CUTOFF * diag[0]))
    return np.sum(np.abs(Q[:, :rank]) ** 2, axis=1)


def universal_tau_bounds(d: int, r: int, c_cor: float = 1.0) -> LevBounds:
    if not 1 <= r <= d:
        raise BadShape(f"rank {r} must lie in [1, {d}]")
    tau = np.ones(d)
    levels = int(math.floor(math.log2(d)))
    bounded_levels = math.log2(d / r)
    correction = c_cor * r**6 * math.log2(r + 1) ** 3
    for i in range(1, levels + 1):
        start = int(math.floor(d * (1.0 - 2.0 ** -(i - 1))))
        stop = int(math.floor(d * (1.0 - 2.0**-i)))
        size = stop - start
        if size <= 0 or i > bounded_levels:
            continue
        j = np.arange(1, size + 1)
        edge = np.minimum(j, size + 1 - j)
        tau[start:stop] = np.minimum(1.0, np.minimum(r / edge, correction / size))
    total = float(tau.sum())
    logger.debug("universal bounds d=%d r=%d total=%.3f", d, r, total)
    return LevBounds(d=d, r=r, tau=tau, total=total, c_cor=c_cor)


def sampling_distribution(bounds: LevBounds) -> np.ndarray:
    return 0.5 * (bounds.tau / bounds.total + 1.0 / bounds.d)


def draw_sampling_plan(bounds: LevBounds, m: int, seed: int) -> SamplingPlan:
    if m < 1:
        raise BadShape("sample count must be positive")
    p = sampling_distribution(bounds)
    rng = np.random.default_rng(seed)
    indices = rng.choice(bounds.d, size=m, replace=True, p=p)
    drawn = p[indices]
    return SamplingPlan(
        d=bounds.d,
        m=m,
        seed=seed,
        indices=indices,
        probabilities=drawn,
        scales=1.0 / np.sqrt(m * drawn),
    )


def full_plan(d: int) -> SamplingPlan:
    """Every row exactly once with unit scale."""
    return SamplingPlan(
        d=d,
        m=d,
        seed=None,
        indices=np.arange(d),
        probabilities=np.full(d, 1.0 / d),
        scales=np.ones(d),
    )


def apply_sampling(plan: SamplingPlan, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[0] != plan.d:
        raise DimMismatch(f"vector length {x.shape[0]} does not match plan dimension {plan.d}")
    return x[plan.indices] * plan.scales


def embedding_sample_count(total: float, beta: float, eta: float, c: float = 1.0) -> int:
    return int(math.ceil(c * total * math.log(1.0 / eta) / beta**2))


def subspace_embedding_check(
    A: np.ndarray,
    plan: SamplingPlan,
    beta: float,
    n_random: int = 64,
    seed: int = 0,
) -> EmbeddingReport:
    A = np.asarray(A)
    if A.shape[0] != plan.d:
        raise DimMismatch("matrix rows do not match plan dimension")
    rows, _, scales = plan.compressed()
    sketch = A[rows] * scales[:, None]

    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((A.shape[1], n_random))
    full_norms = np.linalg.norm(A @ directions, axis=0)
    sketch_norms = np.linalg.norm(sketch @ directions, axis=0)
    keep = full_norms > 1e-12 * np.linalg.norm(A) * np.linalg.norm(directions, axis=0)
    ratios = list(sketch_norms[keep] / full_norms[keep])

    Q, R, _ = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size and diag[0] > 0.0:
        rank = int(np.sum(diag > RANK_CUTOFF * diag[0]))
        basis_sketch = Q[rows, :rank] * scales[:, None]
        singular = scipy.linalg.svdvals(basis_sketch)
        if singular.size < rank:
            singular = np.concatenate([singular, np.zeros(rank - singular.size)])
        ratios.extend([float(singular.min()), float(singular.max())])

    if not ratios:
        return EmbeddingReport(min_ratio=1.0, max_ratio=1.0, beta=beta, passed=True)
    low, high = float(min(ratios)), float(max(ratios))
    return EmbeddingReport(
        min_ratio=low,
        max_ratio=high,
        beta=beta,
        passed=(1.0 - beta) <= low and high <= (1.0 + beta),
    )
