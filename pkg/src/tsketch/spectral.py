from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BadRank, NonFiniteInput, TooLargeForBruteForce
from .toeplitz import SymToeplitz

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_D = 14
PSD_TOLERANCE = 1e-9


@dataclass
class SpectralSummary:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    is_psd: bool


@dataclass
class RankKApprox:
    matrix: np.ndarray
    error: float
    kept_eigenvalues: np.ndarray


@dataclass
class Rank1ToeplitzResult:
    approx: SymToeplitz
    error: float
    scale: float
    signs: np.ndarray


def _as_dense(T: SymToeplitz | np.ndarray) -> np.ndarray:
    if isinstance(T, SymToeplitz):
        return T.dense()
    return np.asarray(T, dtype=float)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    for col in range(vectors.shape[1]):
        column = vectors[:, col]
        scale = np.max(np.abs(column))
        if scale == 0.0:
            continue
        first = np.flatnonzero(np.abs(column) > 1e-12 * scale)[0]
        if column[first] < 0:
            vectors[:, col] = -column
    return vectors


def eig_sym(T: SymToeplitz | np.ndarray) -> SpectralSummary:
    matrix = _as_dense(T)
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteInput("matrix contains NaN or infinite entries")
    values, vectors = scipy.linalg.eigh(matrix)
    values = values[::-1].copy()
    vectors = _fix_signs(vectors[:, ::-1].copy())
    top = float(np.max(np.abs(values))) if values.size else 0.0
    is_psd = bool(values[-1] >= -PSD_TOLERANCE * top)
    if not is_psd:
        logger.debug("negative eigenvalue %.3e flagged", values[-1])
    return SpectralSummary(eigenvalues=values, eigenvectors=vectors, is_psd=is_psd)


def best_rank_k(T: SymToeplitz | np.ndarray, k: int) -> RankKApprox:
    matrix = _as_dense(T)
    d = matrix.shape[0]
    if not 0 <= k <= d:
        raise BadRank(f"rank {k} outside [0, {d}]")
    summary = eig_sym(matrix)
    order = np.argsort(-np.abs(summary.eigenvalues), kind="stable")
    kept, dropped = order[:k], order[k:]
    vectors = summary.eigenvectors[:, kept]
    values = summary.eigenvalues[kept]
    approx = (vectors * values) @ vectors.T
    error = float(np.sqrt(np.sum(summary.eigenvalues[dropped] ** 2)))
    return RankKApprox(matrix=approx, error=error, kept_eigenvalues=values)


def best_rank1_toeplitz_bruteforce(T: SymToeplitz) -> Rank1ToeplitzResult:
    d = T.d
    if d > BRUTE_FORCE_MAX_D:
        raise TooLargeForBruteForce(f"d={d} exceeds brute-force limit {BRUTE_FORCE_MAX_D}")
    matrix = T.dense()
    norm_sq = float(np.sum(matrix**2))
    best: Rank1ToeplitzResult | None = None
    for tail in itertools.product((1.0, -1.0), repeat=d - 1):
        signs = np.array((1.0, *tail))
        outer = np.outer(signs, signs)
        if not np.array_equal(outer, scipy.linalg.toeplitz(outer[:, 0])):
            continue
        projection = float(signs @ matrix @ signs)
        scale = projection / d**2
        error = math.sqrt(max(norm_sq - projection**2 / d**2, 0.0))
        if best is None or error < best.error:
            best = Rank1ToeplitzResult(
                approx=SymToeplitz(scale * outer[:, 0]),
                error=error,
                scale=scale,
                signs=signs,
            )
    assert best is not None
    return best


def weyl_holds(B: np.ndarray, C: np.ndarray, slack: float = 1e-8) -> bool:
    """Check lambda_i(B) - |C|_2 <= lambda_i(B + C) <= lambda_i(B) + |C|_2 for all i."""
    base = eig_sym(B).eigenvalues
    perturbed = eig_sym(B + C).eigenvalues
    radius = float(scipy.linalg.norm(C, 2))
    return bool(np.all(perturbed <= base + radius + slack) and np.all(perturbed >= base - radius - slack))
