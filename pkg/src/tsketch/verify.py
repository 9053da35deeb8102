from __future__ import annotations

import logging
import math
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import TsketchError
from .instances import InstanceSpec, gen_instance
from .leverage import (
    apply_sampling,
    draw_sampling_plan,
    embedding_sample_count,
    exact_leverage_scores,
    subspace_embedding_check,
    universal_tau_bounds,
)
from .models import CheckResult, VerifyReport
from .spectral import best_rank1_toeplitz_bruteforce, best_rank_k, eig_sym, weyl_holds
from .structure import (
    block_gershgorin_bound,
    cross_block_frobenius_bound,
    existence_frobenius,
    existence_spectral,
    fit_exponential_sums,
    taylor_cluster_polys,
    taylor_degree,
    verify_bucket_eigen_bounds,
)
from .toeplitz import (
    FourierFactor,
    FrequencySet,
    SymToeplitz,
    frequency_vector,
    frobenius_via_weighted_column,
    inner_product_magnitude,
    real_collapsed_fourier,
    vandermonde_synthesize,
    weight_vector,
)

logger = logging.getLogger(__name__)

SMALL_COLUMN = (2.0, 1.0, 0.0)
SMALL_GAP = 0.1271
# tau totals never exceed d, so with beta = 1/2 and eta = 0.05 the embedding draws stay below d
EMBEDDING_CONSTANT = 0.08


def _random_freqs(rng: np.random.Generator, count: int) -> np.ndarray:
    while True:
        freqs = np.sort(rng.uniform(0.0, 0.5, size=count))
        if freqs[0] > 0.0 and np.all(np.diff(freqs) > 0.0):
            return freqs


def _random_factor(rng: np.random.Generator, d: int, count: int) -> FourierFactor:
    return FourierFactor(d=d, freqs=FrequencySet(_random_freqs(rng, count)), weights=rng.uniform(0.1, 2.0, size=count))


def check_three_by_three(seed: int = 0) -> CheckResult:
    T = SymToeplitz(np.array(SMALL_COLUMN))
    s2 = math.sqrt(2.0)
    expected = (2.0 + s2) / 4.0 * np.array([[1.0, s2, 1.0], [s2, 2.0, s2], [1.0, s2, 1.0]])
    best = best_rank_k(T, 1)
    toeplitz = best_rank1_toeplitz_bruteforce(T)
    gap = toeplitz.error - best.error
    rank1_ok = bool(np.allclose(best.matrix, expected, atol=1e-9, rtol=0.0))
    toeplitz_ok = bool(np.allclose(toeplitz.approx.first_column, 10.0 / 9.0, atol=1e-12))
    return CheckResult(
        name="three_by_three",
        bound=SMALL_GAP,
        measured=gap,
        passed=bool(rank1_ok and toeplitz_ok and abs(gap - SMALL_GAP) <= 1e-3),
        details={"rank1_error": best.error, "toeplitz_error": toeplitz.error},
    )


def check_norm_identity(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        d = int(rng.integers(2, 129))
        A = SymToeplitz(rng.standard_normal(d))
        B = SymToeplitz(rng.standard_normal(d))
        dense = float(np.linalg.norm(A.dense() - B.dense()))
        worst = max(worst, abs(frobenius_via_weighted_column(A, B) - dense) / dense)
    return CheckResult(name="norm_identity", bound=1e-10, measured=worst, passed=bool(worst <= 1e-10))


def check_trace_identity(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        d = int(rng.integers(2, 129))
        factor = _random_factor(rng, d, int(rng.integers(1, 9)))
        trace = float(np.trace(vandermonde_synthesize(factor).dense()))
        worst = max(worst, abs(trace - 2 * d * factor.total_weight()) / trace)
    return CheckResult(name="trace_identity", bound=1e-10, measured=worst, passed=bool(worst <= 1e-10))


def check_inner_product(seed: int = 0, trials: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        f, g = rng.uniform(-0.5, 0.5, size=2)
        d = int(rng.integers(1, 257))
        direct = abs(np.vdot(frequency_vector(f, d), frequency_vector(g, d)))
        worst = max(worst, abs(direct - inner_product_magnitude(f, g, d)))
    return CheckResult(name="inner_product", bound=1e-9, measured=worst, passed=bool(worst <= 1e-9))


def check_cross_block(seed: int = 0, trials: int = 50) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        d = int(rng.integers(8, 65))
        S1, S2 = _random_freqs(rng, 3), _random_freqs(rng, 3)
        D1, D2 = rng.uniform(0.1, 1.0, size=3), rng.uniform(0.1, 1.0, size=3)
        lam = max(D1.sum(), D2.sum())
        sigma1, sigma2 = rng.choice([-1, 1], size=2)
        report = cross_block_frobenius_bound(D1, S1, int(sigma1), D2, S2, int(sigma2), d, lam)
        if not report.infinite:
            worst = max(worst, report.measured / report.bound)
    return CheckResult(name="cross_block", bound=1.0, measured=worst, constant=0.5, passed=bool(worst <= 1.0 + 1e-9))


def check_block_gershgorin(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(trials):
        sizes = [int(s) for s in rng.integers(1, 5, size=int(rng.integers(1, 5)))]
        n = sum(sizes)
        X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        A = X + X.conj().T
        slack = float(scipy.linalg.norm(A, 2)) - block_gershgorin_bound(A, sizes)
        worst = max(worst, slack)
    return CheckResult(name="block_gershgorin", bound=0.0, measured=worst, passed=bool(worst <= 1e-9))


def check_bucket_eigen_bounds(seed: int = 0, trials: int = 20, d: int = 256) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_heavy, worst_light, ok = 0.0, 0.0, True
    for trial in range(trials):
        spec = InstanceSpec(family="clustered", d=d, k=int(rng.integers(1, 5)), seed=seed * 1000 + trial)
        factor = gen_instance(spec).factor
        assert factor is not None
        report = verify_bucket_eigen_bounds(factor)
        ok = ok and report.passed
        worst_light = max(worst_light, report.light_ratio)
        for level in report.levels:
            worst_heavy = max(worst_heavy, level.empirical_constant)
    return CheckResult(
        name="bucket_eigen_bounds",
        bound=16.0,
        measured=max(worst_heavy, worst_light),
        constant=16.0,
        passed=bool(ok),
        details={"heavy_constant": worst_heavy, "light_ratio": worst_light},
    )


def check_taylor_certification(seed: int = 0, trials: int = 50, d: int = 128, delta: float = 1e-6) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_taylor, worst_fit, ok = 0.0, 0.0, True
    moment_fits = 0
    for _ in range(trials):
        size = int(rng.integers(1, 6))
        f_star = float(rng.uniform(2.0 / d, 0.5 - 2.0 / d))
        freqs = f_star + rng.uniform(-0.5 / d, 0.5 / d, size=size)
        weights = rng.uniform(0.5, 1.5, size=size)
        total = float(weights.sum())
        ell = taylor_degree(float(np.max(np.abs(freqs - f_star))), d, delta)
        polys = taylor_cluster_polys(freqs, weights, f_star, ell, d, delta=delta)
        worst_taylor = max(worst_taylor, polys.residual / (delta * total))
        try:
            even, odd = fit_exponential_sums(polys.p1, d, delta * total)
        except TsketchError as exc:
            logger.warning("fit failed: %s", exc)
            ok = False
            continue
        worst_fit = max(worst_fit, even.residual / (delta * total), odd.residual / (delta * total))
        moment_fits += sum(fit.method == "moment" for fit in (even, odd))
    return CheckResult(
        name="taylor_certification",
        bound=1.0,
        measured=max(worst_taylor, worst_fit),
        passed=bool(ok and worst_taylor <= 1.0 and worst_fit <= 1.0),
        details={"taylor": worst_taylor, "fit": worst_fit, "moment_fits": moment_fits},
    )


def check_existence(seed: int = 0, trials: int = 5, d: int = 64) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, ok = 0.0, True
    for _ in range(trials):
        factor = _random_factor(rng, d, int(rng.integers(1, 6)))
        try:
            report = existence_frobenius(factor, k=2, eps=0.5, delta=1e-3)
        except TsketchError as exc:
            logger.warning("existence construction failed: %s", exc)
            ok = False
            continue
        ok = ok and report.passed
        worst = max(worst, report.measured_error / report.bound)
    return CheckResult(name="existence_frobenius", bound=1.0, measured=worst, passed=bool(ok))


def check_existence_spectral(seed: int = 0, trials: int = 5, d: int = 64) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, ok = 0.0, True
    for _ in range(trials):
        factor = _random_factor(rng, d, int(rng.integers(1, 6)))
        try:
            report = existence_spectral(factor, k=2, delta=1e-3)
        except TsketchError as exc:
            logger.warning("spectral existence construction failed: %s", exc)
            ok = False
            continue
        ok = ok and report.passed
        worst = max(worst, report.measured_error / report.bound)
    return CheckResult(name="existence_spectral", bound=1.0, measured=worst, passed=bool(ok))


def weighted_fourier(freqs: np.ndarray, d: int) -> np.ndarray:
    return weight_vector(d)[:, None] * real_collapsed_fourier(freqs, d)


def check_leverage_domination(seed: int = 0, trials: int = 200, dims: Sequence[int] = (64, 256, 512)) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_excess, worst_constant = -math.inf, 0.0
    for trial in range(trials):
        d = int(dims[trial % len(dims)])
        count = int(rng.integers(1, 9))
        bounds = universal_tau_bounds(d, 2 * count)
        scores = exact_leverage_scores(weighted_fourier(_random_freqs(rng, count), d))
        worst_excess = max(worst_excess, float(np.max(scores - bounds.tau)))
        worst_constant = max(worst_constant, bounds.constant)
    return CheckResult(
        name="leverage_domination",
        bound=1e-9,
        measured=worst_excess,
        constant=worst_constant,
        passed=bool(worst_excess <= 1e-9 and worst_constant <= 64.0),
    )


def check_monotonicity(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(trials):
        d = int(rng.integers(8, 129))
        r = int(rng.integers(1, 9))
        A = rng.standard_normal((d, r))
        base = exact_leverage_scores(A)

        alpha, beta = 0.5, 2.0
        D = np.sqrt(rng.uniform(alpha, beta, size=d))
        reweighted = exact_leverage_scores(D[:, None] * A)
        worst = max(worst, float(np.max(reweighted - (beta / alpha) * base)))

        rows = np.sort(rng.choice(d, size=int(rng.integers(r, d + 1)), replace=False))
        subset = exact_leverage_scores(A[rows])
        worst = max(worst, float(np.max(base[rows] - subset)))

        M = rng.standard_normal((r, int(rng.integers(1, r + 1))))
        combined = exact_leverage_scores(A @ M)
        worst = max(worst, float(np.max(combined - base)))
    return CheckResult(name="monotonicity", bound=1e-9, measured=worst, passed=bool(worst <= 1e-9))


def check_unbiasedness(seed: int = 0, plans: int = 10_000, d: int = 64, m: int = 64) -> CheckResult:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(d)
    bounds = universal_tau_bounds(d, 4)
    energies = [float(np.sum(apply_sampling(draw_sampling_plan(bounds, m, seed + i), x) ** 2)) for i in range(plans)]
    target = float(np.sum(x**2))
    deviation = abs(np.mean(energies) - target) / target
    return CheckResult(name="unbiasedness", bound=0.02, measured=deviation, passed=bool(deviation <= 0.02))


def check_subspace_embedding(
    seed: int = 0,
    seeds: int = 100,
    d: int = 256,
    count: int = 8,
    beta: float = 0.5,
    c: float = EMBEDDING_CONSTANT,
) -> CheckResult:
    rng = np.random.default_rng(seed)
    bounds = universal_tau_bounds(d, 2 * count)
    m = embedding_sample_count(bounds.total, beta, eta=0.05, c=c)
    passes = 0
    for i in range(seeds):
        A = weighted_fourier(_random_freqs(rng, count), d)
        plan = draw_sampling_plan(bounds, m, seed + i)
        passes += subspace_embedding_check(A, plan, beta, seed=seed + i).passed
    rate = passes / seeds
    return CheckResult(name="subspace_embedding", bound=0.95, measured=rate, passed=bool(rate >= 0.95), constant=c, details={"m": m, "d": d})


def check_weyl(seed: int = 0, trials: int = 50) -> CheckResult:
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(trials):
        d = int(rng.integers(2, 65))
        X, Y = rng.standard_normal((d, d)), rng.standard_normal((d, d))
        failures += not weyl_holds(X + X.T, 0.1 * (Y + Y.T))
    return CheckResult(name="weyl", bound=0.0, measured=float(failures), passed=bool(failures == 0))


def check_circulant_eigen(seed: int = 0, trials: int = 20) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(trials):
        d = int(rng.choice([16, 32, 64, 128]))
        factor = gen_instance(InstanceSpec(family="circulant", d=d, k=int(rng.integers(1, 5)), seed=seed + trial)).factor
        assert factor is not None
        expected = np.sort(np.concatenate([d * factor.weights, d * factor.weights, np.zeros(d - 2 * len(factor))]))[::-1]
        actual = eig_sym(vandermonde_synthesize(factor)).eigenvalues
        worst = max(worst, float(np.max(np.abs(actual - expected)) / expected[0]))
    return CheckResult(name="circulant_eigen", bound=1e-8, measured=worst, passed=bool(worst <= 1e-8))


SUITES: dict[str, Callable[[int], CheckResult]] = {
    "three_by_three": check_three_by_three,
    "norm_identity": check_norm_identity,
    "trace_identity": check_trace_identity,
    "inner_product": check_inner_product,
    "cross_block": check_cross_block,
    "block_gershgorin": check_block_gershgorin,
    "bucket_eigen_bounds": check_bucket_eigen_bounds,
    "taylor_certification": check_taylor_certification,
    "existence_frobenius": check_existence,
    "existence_spectral": check_existence_spectral,
    "leverage_domination": check_leverage_domination,
    "monotonicity": check_monotonicity,
    "unbiasedness": check_unbiasedness,
    "subspace_embedding": check_subspace_embedding,
    "weyl": check_weyl,
    "circulant_eigen": check_circulant_eigen,
}


def run_suites(names: Sequence[str] | None = None, seed: int = 0) -> VerifyReport:
    selected = list(names) if names else list(SUITES)
    unknown = [name for name in selected if name not in SUITES]
    if unknown:
        raise TsketchError(f"unknown suites: {', '.join(unknown)}")
    results = []
    for name in selected:
        result = SUITES[name](seed)
        logger.info("%s: %s (measured %.3g)", name, "pass" if result.passed else "FAIL", result.measured)
        results.append(result)
    return VerifyReport(passed=all(result.passed for result in results), results=results)
