from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Literal, Sequence

import numpy as np
import scipy.linalg
from pydantic import BaseModel, Field

from .errors import BadShape, DimMismatch, ExplosionGuard
from .leverage import LevBounds, SamplingPlan, draw_sampling_plan, full_plan, universal_tau_bounds
from .models import LedgerSummary, RecoveryOutput
from .query import LagClient, LagSource, QueryLedger
from .storage import factor_to_file
from .toeplitz import (
    FourierFactor,
    FrequencySet,
    SymToeplitz,
    factor_column_at,
    frobenius_via_weighted_column,
    vandermonde_synthesize,
    weight_vector,
)

logger = logging.getLogger(__name__)

Mode = Literal["exhaustive", "greedy"]
Candidate = tuple[float, ...]

EXHAUSTIVE_LIMIT = 10**6
MAX_LOG_INV_ETA = 64.0


@dataclass(frozen=True)
class SearchSpace:
    d: int
    r1: int
    r2: int
    gamma: float

    def __post_init__(self) -> None:
        if self.r1 < 0 or self.r2 < 1:
            raise BadShape("need r1 >= 0 and r2 >= 1")
        if not 0.0 < self.gamma * (self.r2 + 1) < 0.25:
            raise BadShape(f"gamma={self.gamma} too large for r2={self.r2}")

    @property
    def centers(self) -> np.ndarray:
        grid = (2 * np.arange(self.d) + 1) / (2.0 * self.d)
        return grid[grid < 0.5]

    def doubled(self) -> SearchSpace:
        return SearchSpace(d=self.d, r1=2 * self.r1, r2=self.r2, gamma=self.gamma)

    def expand(self, center: float) -> list[float]:
        margin = self.gamma * (self.r2 + 1)
        clamped = min(max(center, margin), 0.5 - margin)
        offsets = self.gamma * np.arange(1, self.r2 + 1)
        return sorted([*(clamped - offsets), *(clamped + offsets)])

    def candidate(self, centers: Iterable[float]) -> Candidate:
        """Union of the expansions of ``centers``, merged within gamma / 4."""
        members = sorted(f for c in centers for f in self.expand(float(c)))
        merged: list[float] = []
        for f in members:
            if not merged or f - merged[-1] > self.gamma / 4.0:
                merged.append(f)
        return tuple(merged)


@dataclass
class RegressionResult:
    S: Candidate
    a: np.ndarray
    sampled_residual: float
    underdetermined: bool = False
    lags_read: int = 0
    centers: tuple[float, ...] = ()
    system: _SampledSystem | None = field(default=None, repr=False)

    def factor(self, d: int) -> FourierFactor:
        return FourierFactor(d=d, freqs=FrequencySet(np.array(self.S)), weights=self.a)


@dataclass
class ResolvedRecovery:
    d: int
    k: int
    eps: float
    delta: float
    mode: Mode
    r1: int
    r2: int
    gamma: float
    eta: float
    lev_rank: int
    m1: int
    m2: int
    seed: int
    cutoff: float
    project_psd: bool
    threads: int | None
    bounds: LevBounds = field(repr=False)

    @property
    def space(self) -> SearchSpace:
        return SearchSpace(d=self.d, r1=self.r1, r2=self.r2, gamma=self.gamma)

    def as_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "k": self.k,
            "eps": self.eps,
            "delta": self.delta,
            "mode": self.mode,
            "r1": self.r1,
            "r2": self.r2,
            "gamma": self.gamma,
            "eta": self.eta,
            "lev_rank": self.lev_rank,
            "lev_total": self.bounds.total,
            "m1": self.m1,
            "m2": self.m2,
            "seed": self.seed,
            "cutoff": self.cutoff,
            "project_psd": self.project_psd,
        }


class RecoveryConfig(BaseModel):
    k: int = Field(ge=0)
    eps: float = Field(default=0.5, gt=0)
    delta: float = Field(default=1e-3, gt=0, lt=1)
    mode: Mode = "greedy"
    m1: int | None = Field(default=None, ge=1)
    m2: int | None = Field(default=None, ge=1)
    seed: int = 0
    cutoff: float = Field(default=1e-12, gt=0)
    gamma: float | None = Field(default=None, gt=0)
    r1: int | None = Field(default=None, ge=0)
    r2: int | None = Field(default=None, ge=1)
    project_psd: bool = False
    threads: int | None = Field(default=None, ge=1)

    def resolve(self, d: int) -> ResolvedRecovery:
        if d < 2:
            raise BadShape(f"recovery needs d >= 2, got d={d}")
        log_d = math.log2(d) if d > 1 else 0.0
        r1 = self.r1 if self.r1 is not None else self.k * max(1, math.ceil(log_d))
        r2 = self.r2 or max(1, math.ceil(log_d + math.log2(1.0 / self.delta)))
        gamma = self.gamma or 1.0 / (8.0 * d * r2)
        n_centers = max(1, len(SearchSpace(d=d, r1=r1, r2=r2, gamma=gamma).centers))
        log_inv_eta = min(MAX_LOG_INV_ETA, math.log(100.0) + r1 * math.log(n_centers))
        # two real columns for each of the up to 6 r1 r2 frequencies of a stage union
        lev_rank = max(1, min(d, 12 * r1 * r2))
        bounds = universal_tau_bounds(d, lev_rank)
        m1 = self.m1 or min(d, math.ceil(16.0 * bounds.total * log_inv_eta))
        m2 = self.m2 or min(d, 4 * m1)
        return ResolvedRecovery(
            d=d,
            k=self.k,
            eps=self.eps,
            delta=self.delta,
            mode=self.mode,
            r1=r1,
            r2=r2,
            gamma=gamma,
            eta=math.exp(-log_inv_eta),
            lev_rank=lev_rank,
            m1=m1,
            m2=m2,
            seed=self.seed,
            cutoff=self.cutoff,
            project_psd=self.project_psd,
            threads=self.threads,
            bounds=bounds,
        )


@dataclass
class RecoveredFactor:
    factor: FourierFactor
    ledger: QueryLedger
    stage_errors: list[float]
    config: dict[str, Any]
    stages: list[RegressionResult] = field(default_factory=list)
    centers: tuple[float, ...] = ()

    def to_output(self) -> RecoveryOutput:
        return RecoveryOutput(
            factor=factor_to_file(self.factor),
            ledger=LedgerSummary(distinct_lags=self.ledger.distinct_lags, total_reads=self.ledger.total_reads),
            stage_errors=self.stage_errors,
            config=self.config,
        )


@dataclass
class _SampledSystem:
    """Sampled weighted regression rows, compressed to one row per distinct lag."""

    lags: np.ndarray
    row_scale: np.ndarray
    values: np.ndarray
    target: np.ndarray
    m: int

    @classmethod
    def build(cls, plan: SamplingPlan, values_at_draws: np.ndarray, offset: np.ndarray | None = None) -> _SampledSystem:
        lags, first, combined = plan.compressed()
        values = values_at_draws[first]
        row_scale = weight_vector(plan.d)[lags] * combined
        residual = values if offset is None else values - offset[first]
        return cls(lags=lags, row_scale=row_scale, values=values, target=row_scale * residual, m=plan.m)

    def design(self, S: Sequence[float]) -> np.ndarray:
        return self.row_scale[:, None] * 2.0 * np.cos(2.0 * np.pi * np.outer(self.lags, S))

    def solve(self, S: Candidate, cutoff: float) -> RegressionResult:
        if not S:
            return RegressionResult(S=(), a=np.zeros(0), sampled_residual=float(np.linalg.norm(self.target)))
        A = self.design(S)
        a, *_ = scipy.linalg.lstsq(A, self.target, cond=cutoff)
        residual = float(np.linalg.norm(A @ a - self.target))
        return RegressionResult(S=S, a=a, sampled_residual=residual, underdetermined=self.lags.size < len(S))


def _parallel_map(fn: Callable[[Candidate], RegressionResult], items: list[Candidate], threads: int | None) -> list[RegressionResult]:
    if not threads or threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _argmin(results: Iterable[RegressionResult]) -> RegressionResult:
    return min(results, key=lambda result: (result.sampled_residual, result.S))


def enumerate_candidates(
    space: SearchSpace,
    mode: Mode = "exhaustive",
    base: Sequence[float] = (),
    limit: int = EXHAUSTIVE_LIMIT,
) -> Iterator[Candidate]:
    centers = [float(c) for c in space.centers]
    if mode == "greedy":
        for center in centers:
            yield space.candidate((*base, center))
        return
    for candidate, _ in _exhaustive_items(space, limit):
        yield candidate


def _exhaustive_items(space: SearchSpace, limit: int = EXHAUSTIVE_LIMIT) -> Iterator[tuple[Candidate, tuple[float, ...]]]:
    centers = [float(c) for c in space.centers]
    if len(centers) ** space.r1 > limit:
        raise ExplosionGuard(
            f"exhaustive search over {len(centers)}^{space.r1} center tuples exceeds {limit}; use greedy mode"
        )
    seen: set[Candidate] = set()
    for combo in itertools.combinations_with_replacement(centers, space.r1):
        candidate = space.candidate(combo)
        if candidate not in seen:
            seen.add(candidate)
            yield candidate, combo


def solve_sampled_regression(
    S: FrequencySet | Sequence[float],
    plan: SamplingPlan,
    sampled_b: np.ndarray,
    cutoff: float = 1e-12,
) -> RegressionResult:
    """Minimize |S W F_S R_S a - sampled_b| where sampled_b = apply_sampling(plan, W T_1)."""
    freqs = S.as_tuple() if isinstance(S, FrequencySet) else tuple(float(f) for f in S)
    sampled_b = np.asarray(sampled_b, dtype=float)
    if sampled_b.shape[0] != plan.m:
        raise DimMismatch(f"sampled target has {sampled_b.shape[0]} entries, plan has {plan.m}")
    lags, first, combined = plan.compressed()
    counts_scale = combined / plan.scales[first]
    target = sampled_b[first] * counts_scale
    row_scale = weight_vector(plan.d)[lags] * combined
    system = _SampledSystem(lags=lags, row_scale=row_scale, values=target / row_scale, target=target, m=plan.m)
    return system.solve(freqs, cutoff)


def _exhaustive(system: _SampledSystem, space: SearchSpace, cutoff: float, threads: int | None) -> RegressionResult:
    items = list(_exhaustive_items(space))
    results = _parallel_map(lambda S: system.solve(S, cutoff), [candidate for candidate, _ in items], threads)
    for result, (_, combo) in zip(results, items):
        result.centers = combo
    logger.debug("exhaustive search scored %d candidates", len(results))
    return _argmin(results)


def _greedy(system: _SampledSystem, space: SearchSpace, budget: int, cutoff: float, threads: int | None) -> RegressionResult:
    centers = [float(c) for c in space.centers]
    chosen: list[float] = []
    best = system.solve((), cutoff)
    for _ in range(budget):
        candidates = list(enumerate_candidates(space, "greedy", base=chosen))
        results = _parallel_map(lambda S: system.solve(S, cutoff), candidates, threads)
        index = min(range(len(results)), key=lambda i: (results[i].sampled_residual, results[i].S))
        chosen.append(centers[index])
        best = results[index]

    # one backtracking sweep: swap each chosen center for any strictly better one
    for position in range(len(chosen)):
        trials = [space.candidate(chosen[:position] + [c] + chosen[position + 1 :]) for c in centers]
        results = _parallel_map(lambda S: system.solve(S, cutoff), trials, threads)
        index = min(range(len(results)), key=lambda i: (results[i].sampled_residual, results[i].S))
        if results[index].sampled_residual < best.sampled_residual:
            chosen[position] = centers[index]
            best = results[index]
    logger.debug("greedy search chose centers %s", chosen)
    best.centers = tuple(chosen)
    return best


def _search(system: _SampledSystem, space: SearchSpace, mode: Mode, cutoff: float, threads: int | None) -> RegressionResult:
    if space.r1 == 0:
        return system.solve((), cutoff)
    if mode == "exhaustive":
        return _exhaustive(system, space, cutoff, threads)
    return _greedy(system, space, space.r1, cutoff, threads)


def _draw_plan(config: ResolvedRecovery, m: int, seed: int) -> SamplingPlan:
    """A budget of d or more reads the whole column once instead of drawing with replacement."""
    if m >= config.d:
        return full_plan(config.d)
    return draw_sampling_plan(config.bounds, m, seed)


def _read_system(client: LagClient, plan: SamplingPlan, offset: FourierFactor | None = None) -> _SampledSystem:
    values = client.read(plan.indices)
    shift = None if offset is None else factor_column_at(offset, plan.indices)
    return _SampledSystem.build(plan, values, shift)


def greedy_search(
    client: LagClient,
    space: SearchSpace,
    plan: SamplingPlan,
    budget: int,
    offset: FourierFactor | None = None,
    cutoff: float = 1e-12,
    threads: int | None = None,
) -> RegressionResult:
    system = _read_system(client, plan, offset)
    return _greedy(system, space, budget, cutoff, threads)


def stage1_constant(client: LagClient, space: SearchSpace, config: ResolvedRecovery) -> RegressionResult:
    before = client.ledger.distinct_lags
    plan = _draw_plan(config, config.m1, config.seed)
    system = _read_system(client, plan)
    result = _search(system, space, config.mode, config.cutoff, config.threads)
    result.lags_read = client.ledger.distinct_lags - before
    result.system = system
    logger.info("stage 1: |S|=%d residual=%.6g lags=%d", len(result.S), result.sampled_residual, result.lags_read)
    return result


def stage2_refine(
    client: LagClient,
    stage1: RegressionResult,
    space: SearchSpace,
    config: ResolvedRecovery,
) -> RegressionResult:
    before = client.ledger.distinct_lags
    plan = _draw_plan(config, config.m2, config.seed + 1)
    system = _read_system(client, plan, offset=stage1.factor(config.d))
    zero = system.solve((), config.cutoff)
    result = _search(system, space, config.mode, config.cutoff, config.threads)
    if not result.sampled_residual < zero.sampled_residual:
        result = zero
    result.lags_read = client.ledger.distinct_lags - before
    result.system = system
    logger.info("stage 2: |S|=%d residual=%.6g lags=%d", len(result.S), result.sampled_residual, result.lags_read)
    return result


def _stacked_solve(systems: list[_SampledSystem], S: Candidate, cutoff: float) -> np.ndarray:
    scale = 1.0 / math.sqrt(len(systems))
    A = np.vstack([system.design(S) * scale for system in systems])
    b = np.concatenate([system.row_scale * system.values * scale for system in systems])
    a, *_ = scipy.linalg.lstsq(A, b, cond=cutoff)
    return a


def _project_nonnegative(factor: FourierFactor, systems: list[_SampledSystem], cutoff: float) -> FourierFactor:
    while len(factor) and np.any(factor.weights < 0):
        survivors = factor.freqs.freqs[factor.weights > 0]
        if survivors.size == 0:
            return FourierFactor.zero(factor.d)
        S = tuple(float(f) for f in survivors)
        factor = FourierFactor(d=factor.d, freqs=FrequencySet(survivors), weights=_stacked_solve(systems, S, cutoff))
    return factor


def _check_feasible(config: ResolvedRecovery) -> None:
    if config.mode != "exhaustive":
        return
    n = len(config.space.centers)
    for r in (config.r1, 2 * config.r1):
        if n**r > EXHAUSTIVE_LIMIT:
            raise ExplosionGuard(
                f"exhaustive search over {n}^{r} center tuples exceeds {EXHAUSTIVE_LIMIT}; use greedy mode or lower r1"
            )


def recover(source: LagSource | LagClient, config: RecoveryConfig, d: int | None = None) -> RecoveredFactor:
    client = source if isinstance(source, LagClient) else LagClient(source, d)
    resolved = config.resolve(client.d)
    _check_feasible(resolved)
    logger.info("recovering d=%d with r1=%d r2=%d m1=%d m2=%d", resolved.d, resolved.r1, resolved.r2, resolved.m1, resolved.m2)
    if resolved.r1 == 0:
        return RecoveredFactor(
            factor=FourierFactor.zero(resolved.d),
            ledger=client.ledger,
            stage_errors=[],
            config=resolved.as_dict(),
        )

    space = resolved.space
    first = stage1_constant(client, space, resolved)
    second = stage2_refine(client, first, space.doubled(), resolved)
    pairs = list(zip(first.S, first.a)) + list(zip(second.S, second.a))
    factor = FourierFactor.from_pairs(resolved.d, [(f, float(a)) for f, a in pairs], tol=resolved.gamma / 4.0)

    if resolved.project_psd:
        systems = [stage.system for stage in (first, second) if stage.system is not None]
        factor = _project_nonnegative(factor, systems, resolved.cutoff)

    return RecoveredFactor(
        factor=factor,
        ledger=client.ledger,
        stage_errors=[first.sampled_residual, second.sampled_residual],
        config=resolved.as_dict(),
        stages=[first, second],
        centers=first.centers + second.centers,
    )


def evaluate_true_error(T: SymToeplitz, factor: FourierFactor) -> float:
    if factor.d != T.d:
        raise DimMismatch(f"dimension mismatch: {T.d} vs {factor.d}")
    return frobenius_via_weighted_column(T, vandermonde_synthesize(factor))


def full_access_optimum(
    T: SymToeplitz,
    space: SearchSpace,
    cutoff: float = 1e-12,
    threads: int | None = None,
) -> RegressionResult:
    """Best candidate when every lag of T is visible; its residual is the true Frobenius error."""
    plan = full_plan(T.d)
    system = _SampledSystem.build(plan, T.first_column)
    return _exhaustive(system, space, cutoff, threads)
