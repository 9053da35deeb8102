from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
import scipy.linalg

from .errors import BadShape, IllConditionedGamma, NotClustered, NotHermitian, TsketchError
from .spectral import eig_sym
from .toeplitz import (
    FourierFactor,
    FrequencySet,
    SymToeplitz,
    frequency_vector,
    frobenius_via_weighted_column,
    real_collapsed_fourier,
    vandermonde_synthesize,
    weight_vector,
    wrap_distance,
)

logger = logging.getLogger(__name__)

Parity = Literal["even", "odd"]

EPS_FLOOR = 1e-12
MOMENT_CUTOFF = 1e-12
MAX_TAYLOR_DEGREE = 200
INNER_PRODUCT_CONSTANT = 0.5
EDGE_NUDGE = 1e-12
# multiples of 1/(d n) tried in order; 1/64 keeps the offsets well inside one bucket
GAMMA_SCALES = (1.0 / 64, 1.0 / 8, 1.0, 1.0 / 512, 1.0 / 4096, 1.0 / 32768, 1.0 / 262144, 1.0 / 2097152)
# spacing (times d) of the widened fallback net: the cosines then form a
# Fourier extension of [-1, 1] to a period of length 4
EXTENSION_GAMMA = 0.25
LAG_FIT_TERMS = 8


@dataclass
class Buckets:
    d: int
    assignments: dict[int, list[tuple[float, float]]] = field(default_factory=dict)

    @property
    def weights(self) -> dict[int, float]:
        return {j: sum(a for _, a in members) for j, members in self.assignments.items()}

    def nonempty(self) -> list[int]:
        return sorted(j for j, members in self.assignments.items() if members)

    def center(self, j: int) -> float:
        return (j - 0.5) / self.d

    def total_weight(self) -> float:
        return float(sum(self.weights.values()))

    def factor(self, indices: Sequence[int] | None = None) -> FourierFactor:
        chosen = self.nonempty() if indices is None else indices
        pairs = [pair for j in chosen for pair in self.assignments.get(j, [])]
        return FourierFactor.from_pairs(self.d, pairs)


@dataclass
class ClusterApproxParams:
    ell: int | None = None
    gamma: float | None = None
    eps: float = 1e-9
    delta: float = 1e-6

    def __post_init__(self) -> None:
        if self.ell is not None and self.ell < 1:
            raise BadShape("Taylor degree must be at least 1")
        if self.gamma is not None and self.gamma <= 0:
            raise BadShape("gamma must be positive")


@dataclass
class TaylorPolys:
    p1: np.ndarray
    p2: np.ndarray
    residual: float
    bound: float


@dataclass
class ExponentialSum:
    """p(t) ~ sum_j 2 c_j cos(2 pi j gamma t) (even) or 2 c_j sin(2 pi j gamma t) (odd), j = 1..n."""

    coefficients: np.ndarray
    parity: Parity
    gamma: float
    residual: float
    method: str

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        return _exp_basis(np.asarray(t, dtype=float), self.coefficients.size, self.gamma, self.parity) @ self.coefficients


@dataclass
class ClusteredApprox:
    factor: FourierFactor
    measured_error: float
    pointwise_error: float
    bound: float
    ell: int
    gamma: float
    coefficient_norm: float
    methods: tuple[str, str]
    # "exponential_sum" when the Taylor plus moment construction certifies, else "lag_fit"
    route: str = "exponential_sum"


@dataclass
class ExistenceConstants:
    C: float = 4.0
    c_prime: float = 1.0


@dataclass
class ExistenceReport:
    factor: FourierFactor
    norm: Literal["frobenius", "spectral"]
    measured_error: float
    bound: float
    threshold: float
    heavy_buckets: int
    bucket_bound: float
    constants: ExistenceConstants

    @property
    def passed(self) -> bool:
        return self.measured_error <= self.bound


@dataclass
class BucketBoundConstants:
    C_heavy: float = 16.0
    C_light: float = 16.0


@dataclass
class HeavyLevel:
    level: float
    buckets_at_least: int
    eigenvalues_above: int
    required: float
    empirical_constant: float
    passed: bool


@dataclass
class BucketEigenReport:
    levels: list[HeavyLevel]
    light_ratio: float
    constants: BucketBoundConstants

    @property
    def passed(self) -> bool:
        return all(level.passed for level in self.levels) and self.light_ratio <= self.constants.C_light


@dataclass
class CrossBlockReport:
    bound: float
    measured: float
    constant: float
    distance: float

    @property
    def infinite(self) -> bool:
        return math.isinf(self.bound)

    @property
    def passed(self) -> bool:
        return self.measured <= self.bound * (1.0 + 1e-9)


def _log2d(d: int) -> float:
    return max(1.0, math.log2(d))


def bucketize(factor: FourierFactor) -> Buckets:
    buckets = Buckets(d=factor.d)
    for f, a in factor.pairs():
        j = int(math.floor(f * factor.d + 1e-9)) + 1
        buckets.assignments.setdefault(j, []).append((f, a))
    return buckets


def heavy_light_split(factor: FourierFactor, lam: float) -> tuple[FourierFactor, FourierFactor]:
    if lam < 0:
        raise TsketchError("threshold must be non-negative")
    buckets = bucketize(factor)
    weights = buckets.weights
    heavy = [j for j in buckets.nonempty() if weights[j] > lam]
    light = [j for j in buckets.nonempty() if weights[j] <= lam]
    return buckets.factor(heavy), buckets.factor(light)


def taylor_degree(width: float, d: int, delta: float) -> int:
    """Smallest degree whose exponential-series tail over |t| <= d stays below delta / 2."""
    x = 2.0 * math.pi * abs(width) * d
    if x == 0.0:
        return 1
    target = math.log(delta / 2.0)
    for ell in range(1, MAX_TAYLOR_DEGREE + 1):
        ratio = x / (ell + 2)
        if ratio >= 1.0:
            continue
        log_tail = (ell + 1) * math.log(x) - math.lgamma(ell + 2) - math.log1p(-ratio)
        if log_tail <= target:
            return ell
    raise NotClustered(f"no Taylor degree up to {MAX_TAYLOR_DEGREE} reaches delta={delta}")


def _eval_poly(coeffs: np.ndarray, t: np.ndarray, d: int) -> np.ndarray:
    scaled = np.asarray(coeffs) * float(d) ** np.arange(len(coeffs))
    return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float) / d, scaled)


def _grid(d: int) -> np.ndarray:
    return np.arange(-d, d + 1, dtype=float)


def taylor_cluster_polys(
    freqs: Sequence[float],
    weights: Sequence[float],
    f_star: float,
    ell: int,
    d: int,
    delta: float = 1e-6,
) -> TaylorPolys:
    freqs = np.asarray(freqs, dtype=float)
    weights = np.asarray(weights, dtype=float)
    offsets = freqs - f_star
    if offsets.size and np.max(np.abs(offsets)) > 1.0 / d + 1e-12:
        raise NotClustered(f"cluster width {np.max(np.abs(offsets)):.3e} exceeds 1/d")
    if ell < 1:
        raise BadShape("Taylor degree must be at least 1")
    orders = np.arange(ell + 1)
    factorials = np.array([math.factorial(m) for m in orders], dtype=float)
    powers = (2j * np.pi * offsets[None, :]) ** orders[:, None]
    p1 = (powers @ weights) / factorials
    p2 = np.conj(p1)

    t = _grid(d)
    exact = 2.0 * np.cos(2.0 * np.pi * np.outer(t, freqs)) @ weights if freqs.size else np.zeros_like(t)
    approx = 2.0 * np.real(np.exp(2j * np.pi * f_star * t) * _eval_poly(p1, t, d))
    residual = float(np.max(np.abs(exact - approx)))
    bound = delta * float(np.sum(np.abs(weights)))
    logger.debug("taylor ell=%d residual=%.3e bound=%.3e", ell, residual, bound)
    return TaylorPolys(p1=p1, p2=p2, residual=residual, bound=bound)


def _exp_basis(t: np.ndarray, n: int, gamma: float, parity: Parity) -> np.ndarray:
    angles = 2.0 * np.pi * gamma * np.outer(t, np.arange(1, n + 1))
    return 2.0 * (np.cos(angles) if parity == "even" else np.sin(angles))


def _moment_orders(n: int, parity: Parity) -> np.ndarray:
    return 2 * np.arange(n) + (0 if parity == "even" else 1)


def _moment_solution(coeffs: np.ndarray, parity: Parity, gamma: float, d: int) -> np.ndarray | None:
    """Match the first n same-parity Taylor moments of the cosine (sine) sum to p.

    Only powers of p's own parity appear in the rows; orders past deg p are
    matched to zero.
    """
    n = coeffs.size
    theta = 2.0 * np.pi * gamma * d
    nodes = np.arange(1, n + 1, dtype=float)
    orders = _moment_orders(n, parity)
    rhs = np.zeros(n)
    for row, k in enumerate(orders):
        if k >= n or coeffs[k] == 0.0:
            continue
        try:
            magnitude = math.exp(k * math.log(d) + math.lgamma(k + 1) - k * math.log(theta))
        except OverflowError:
            return None
        sign = (-1.0) ** (k // 2)
        rhs[row] = coeffs[k] * magnitude / (2.0 * sign)
    if not np.all(np.isfinite(rhs)):
        return None
    with np.errstate(over="ignore"):
        system = nodes[None, :] ** orders[:, None].astype(float)
    if not np.all(np.isfinite(system)):
        return None
    row_scale = np.max(np.abs(system), axis=1)
    system = system / row_scale[:, None]
    rhs = rhs / row_scale
    col_scale = np.max(np.abs(system), axis=0)
    solution, *_ = scipy.linalg.lstsq(system / col_scale[None, :], rhs, cond=MOMENT_CUTOFF)
    return solution / col_scale


def _grid_solution(target: np.ndarray, basis: np.ndarray) -> np.ndarray:
    col_scale = np.max(np.abs(basis), axis=0)
    col_scale[col_scale == 0.0] = 1.0
    solution, *_ = scipy.linalg.lstsq(basis / col_scale[None, :], target, cond=MOMENT_CUTOFF)
    return solution / col_scale


def poly_to_fourier(
    coeffs: Sequence[float],
    parity: Parity,
    gamma: float,
    d: int,
    eps: float,
    terms: int | None = None,
) -> ExponentialSum:
    """Fit the polynomial with ``terms`` (default: its length) cosines or sines
    at multiples of gamma, certified on the integer grid |t| <= d."""
    coeffs = np.asarray(coeffs, dtype=float)
    if parity not in ("even", "odd"):
        raise BadShape(f"unknown parity {parity!r}")
    wrong = np.arange(coeffs.size) % 2 == (1 if parity == "even" else 0)
    if np.any(coeffs[wrong] != 0.0):
        raise BadShape(f"{parity} polynomial has powers of the other parity")
    eps = max(eps, EPS_FLOOR)
    n = max(coeffs.size, terms or 0, 1)
    coeffs = np.pad(coeffs, (0, n - coeffs.size))

    t = _grid(d)
    target = _eval_poly(coeffs, t, d)
    basis = _exp_basis(t, n, gamma, parity)

    fits: list[tuple[float, str, np.ndarray]] = []
    moment = _moment_solution(coeffs, parity, gamma, d)
    if moment is not None:
        fits.append((float(np.max(np.abs(basis @ moment - target))), "moment", moment))
    if not fits or fits[0][0] > eps:
        grid = _grid_solution(target, basis)
        fits.append((float(np.max(np.abs(basis @ grid - target))), "least_squares", grid))
    residual, method, solution = min(fits, key=lambda item: item[0])
    if residual > eps:
        raise IllConditionedGamma(
            f"{parity} fit residual {residual:.3e} exceeds {eps:.3e} at gamma={gamma:.3e}; try a larger gamma"
        )
    return ExponentialSum(coefficients=solution, parity=parity, gamma=gamma, residual=residual, method=method)


def fit_exponential_sums(
    p1: np.ndarray,
    d: int,
    eps: float,
    gamma: float | None = None,
) -> tuple[ExponentialSum, ExponentialSum]:
    """Fit the even and odd parts of p1 = p_even + i p_odd on |t| <= d.

    Without an explicit gamma the candidates are GAMMA_SCALES / (d n), starting
    at 1/(64 d n), until both fits certify. The last attempt doubles the terms
    on the wider 1/(4d) net.
    """
    n = p1.size
    orders = np.arange(n)
    even_part = np.where(orders % 2 == 0, p1.real, 0.0)
    odd_part = np.where(orders % 2 == 1, p1.imag, 0.0)
    if gamma:
        schedule = [(gamma, n), (gamma, 2 * n)]
    else:
        base = 1.0 / (d * n)
        schedule = [(base * scale, n) for scale in GAMMA_SCALES]
        schedule.append((EXTENSION_GAMMA / d, 2 * n))
    failure: IllConditionedGamma | None = None
    for candidate, terms in schedule:
        try:
            return (
                poly_to_fourier(even_part, "even", candidate, d, eps, terms=terms),
                poly_to_fourier(odd_part, "odd", candidate, d, eps, terms=terms),
            )
        except IllConditionedGamma as exc:
            logger.debug("gamma=%.3e with %d terms rejected: %s", candidate, terms, exc)
            failure = exc
    assert failure is not None
    raise failure


def _fold(freq: float) -> float:
    freq = abs(freq) % 1.0
    return 1.0 - freq if freq > 0.5 else freq


def _fold_clamped(freq: float) -> float:
    return min(max(_fold(freq), EDGE_NUDGE), 0.5 - EDGE_NUDGE)


def _fit_on_lags(target: SymToeplitz, f_star: float, gamma: float, n: int) -> FourierFactor:
    """Weighted least squares for the column of ``target`` over the net f_star +- j gamma, j = 1..n."""
    shifts = gamma * np.arange(1, n + 1)
    net = np.unique([_fold_clamped(freq) for freq in np.concatenate([f_star + shifts, f_star - shifts])])
    w = weight_vector(target.d)
    basis = w[:, None] * real_collapsed_fourier(net, target.d)
    weights = _grid_solution(w * target.first_column, basis)
    return FourierFactor(d=target.d, freqs=FrequencySet(net), weights=weights)


def clustered_approx(
    factor: FourierFactor,
    f_star: float,
    params: ClusterApproxParams | None = None,
) -> ClusteredApprox:
    params = params or ClusterApproxParams()
    d = factor.d
    freqs = factor.freqs.freqs
    offsets = freqs - f_star
    width = float(np.max(np.abs(offsets))) if offsets.size else 0.0
    if width > 1.0 / d + 1e-12:
        raise NotClustered(f"cluster width {width:.3e} exceeds 1/d")
    # Taylor tolerance is per entry; dividing by d keeps the Frobenius error under delta * sum(a).
    entry_delta = params.delta / d
    ell = params.ell or taylor_degree(width, d, entry_delta)
    eps = max(params.eps, EPS_FLOOR)

    polys = taylor_cluster_polys(freqs, factor.weights, f_star, ell, d, delta=entry_delta)
    target = vandermonde_synthesize(factor)
    bound = params.delta * float(np.sum(np.abs(factor.weights))) + eps * d

    approx: FourierFactor | None = None
    route = "exponential_sum"
    try:
        even, odd = fit_exponential_sums(polys.p1, d, eps / 4.0, params.gamma)
    except IllConditionedGamma as exc:
        logger.debug("exponential-sum fit failed at %.6f: %s", f_star, exc)
    else:
        gamma = even.gamma
        methods = (even.method, odd.method)
        pairs: list[tuple[float, float]] = []
        shifts = gamma * np.arange(1, even.coefficients.size + 1)
        for shift, alpha, beta in zip(shifts, even.coefficients, odd.coefficients):
            pairs.append((f_star + shift, alpha + beta))
            pairs.append((f_star - shift, alpha - beta))
        approx = FourierFactor.from_pairs(d, [(_fold_clamped(freq), weight) for freq, weight in pairs], tol=1e-12)

    if approx is None or frobenius_via_weighted_column(target, vandermonde_synthesize(approx)) > bound:
        terms = max(ell + 1, LAG_FIT_TERMS)
        gamma = params.gamma or 1.0 / (d * terms)
        methods = ("lag_fit", "lag_fit")
        route = "lag_fit"
        logger.debug("cluster at %.6f: exponential-sum construction missed its bound, fitting lags instead", f_star)
        approx = _fit_on_lags(target, f_star, gamma, terms)

    synthesized = vandermonde_synthesize(approx)
    measured = frobenius_via_weighted_column(target, synthesized)
    pointwise = float(np.max(np.abs(target.first_column - synthesized.first_column)))
    logger.debug("cluster at %.6f: ell=%d gamma=%.3e error=%.3e bound=%.3e", f_star, ell, gamma, measured, bound)
    return ClusteredApprox(
        factor=approx,
        measured_error=measured,
        pointwise_error=pointwise,
        bound=bound,
        ell=ell,
        gamma=gamma,
        coefficient_norm=float(np.linalg.norm(approx.weights)),
        methods=methods,
        route=route,
    )


def _approximate_heavy(
    factor: FourierFactor,
    lam: float,
    delta: float,
    norm_T: float,
) -> tuple[FourierFactor, int]:
    heavy, _ = heavy_light_split(factor, lam)
    buckets = bucketize(heavy)
    indices = buckets.nonempty()
    if not indices:
        return FourierFactor.zero(factor.d), 0
    d = factor.d
    eps_c = delta * norm_T / (2.0 * len(indices) * d)
    pairs: list[tuple[float, float]] = []
    for j in indices:
        sub = buckets.factor([j])
        f_star = float(np.average(sub.freqs.freqs, weights=np.abs(sub.weights) + 1e-300))
        approx = clustered_approx(sub, f_star, ClusterApproxParams(eps=eps_c, delta=delta / 2.0))
        pairs.extend(approx.factor.pairs())
    return FourierFactor.from_pairs(d, pairs, tol=1e-12), len(indices)


def _real_rank(k: int, d: int) -> int:
    """Real rank of k frequency pairs: each f contributes the conjugate pair f, -f."""
    return min(d, 2 * k)


def existence_frobenius(
    factor: FourierFactor,
    k: int,
    eps: float,
    delta: float,
    constants: ExistenceConstants | None = None,
) -> ExistenceReport:
    constants = constants or ExistenceConstants()
    if np.any(factor.weights < 0):
        raise TsketchError("existence construction needs non-negative weights")
    d = factor.d
    T = vandermonde_synthesize(factor)
    spectrum = eig_sym(T).eigenvalues
    log_d = _log2d(d)
    rank = _real_rank(k, d)
    q = min(d, int(math.ceil(constants.C * k * log_d**5 / eps)))
    lam = math.inf if q == 0 else max(0.0, float(spectrum[q - 1])) * log_d / (constants.c_prime * d)
    norm_T = T.frobenius_norm()
    approx, heavy_count = _approximate_heavy(factor, lam, delta, norm_T)
    measured = frobenius_via_weighted_column(T, vandermonde_synthesize(approx))
    optimal = float(np.sqrt(np.sum(np.sort(np.abs(spectrum))[::-1][rank:] ** 2)))
    return ExistenceReport(
        factor=approx,
        norm="frobenius",
        measured_error=measured,
        bound=(1.0 + eps) * optimal + delta * norm_T,
        threshold=lam,
        heavy_buckets=heavy_count,
        bucket_bound=(k + 2) * log_d**3,
        constants=constants,
    )


def existence_spectral(
    factor: FourierFactor,
    k: int,
    delta: float,
    constants: ExistenceConstants | None = None,
) -> ExistenceReport:
    constants = constants or ExistenceConstants()
    if np.any(factor.weights < 0):
        raise TsketchError("existence construction needs non-negative weights")
    d = factor.d
    T = vandermonde_synthesize(factor)
    spectrum = eig_sym(T).eigenvalues
    log_d = _log2d(d)
    rank = _real_rank(k, d)
    lam_next = float(spectrum[rank]) if rank < d else 0.0
    lam = max(0.0, lam_next) * log_d / (constants.c_prime * d)
    norm_T = T.frobenius_norm()
    approx, heavy_count = _approximate_heavy(factor, lam, delta, norm_T)
    difference = T.dense() - vandermonde_synthesize(approx).dense()
    measured = float(scipy.linalg.norm(difference, 2))
    magnitudes = np.sort(np.abs(spectrum))[::-1]
    optimal = float(magnitudes[rank]) if rank < d else 0.0
    return ExistenceReport(
        factor=approx,
        norm="spectral",
        measured_error=measured,
        bound=optimal * (1.0 + constants.C * log_d**2) + delta * norm_T,
        threshold=lam,
        heavy_buckets=heavy_count,
        bucket_bound=(k + 2) * log_d**3,
        constants=constants,
    )


def block_gershgorin_bound(A: np.ndarray, block_sizes: Sequence[int]) -> float:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise BadShape("block matrix must be square")
    if sum(block_sizes) != A.shape[0] or any(size < 1 for size in block_sizes):
        raise BadShape("block sizes must be positive and cover the matrix")
    scale = max(float(np.max(np.abs(A))), 1.0)
    if not np.allclose(A, A.conj().T, atol=1e-12 * scale, rtol=0.0):
        raise NotHermitian("block matrix is not Hermitian")
    edges = np.concatenate([[0], np.cumsum(block_sizes)])
    best = 0.0
    for i in range(len(block_sizes)):
        rows = slice(edges[i], edges[i + 1])
        total = 0.0
        for j in range(len(block_sizes)):
            block = A[rows, edges[j] : edges[j + 1]]
            total += float(scipy.linalg.norm(block, 2))
        best = max(best, total)
    return best


def verify_bucket_eigen_bounds(
    factor: FourierFactor,
    constants: BucketBoundConstants | None = None,
) -> BucketEigenReport:
    constants = constants or BucketBoundConstants()
    d = factor.d
    if d > 512:
        raise BadShape("bucket eigen bounds use a dense eigensolve; d must be at most 512")
    log_d = _log2d(d)
    spectrum = eig_sym(vandermonde_synthesize(factor)).eigenvalues
    weights = np.array(sorted(w for w in bucketize(factor).weights.values() if w > 0))

    levels: list[HeavyLevel] = []
    for lam in np.unique(weights):
        count = int(np.sum(weights >= lam))
        above = int(np.sum(spectrum >= d * lam / (constants.C_heavy * log_d)))
        required = count / log_d**3
        needed = max(1, int(math.ceil(required)))
        pivot = float(spectrum[needed - 1]) if needed <= d else 0.0
        empirical = d * lam / (log_d * pivot) if pivot > 0 else math.inf
        levels.append(
            HeavyLevel(
                level=float(lam),
                buckets_at_least=count,
                eigenvalues_above=above,
                required=required,
                empirical_constant=empirical,
                passed=above >= required,
            )
        )

    top = float(weights.max()) if weights.size else 0.0
    norm_2 = float(np.max(np.abs(spectrum)))
    light_ratio = norm_2 / (d * top * log_d) if top > 0 else 0.0
    return BucketEigenReport(levels=levels, light_ratio=light_ratio, constants=constants)


def well_separated_subsample(buckets: Buckets, w: float, lam: float = 0.0) -> Buckets:
    if not 0.0 < w <= 0.5:
        raise BadShape("separation must lie in (0, 1/2]")
    weights = buckets.weights
    heavy = [j for j in buckets.nonempty() if weights[j] > lam]
    stride = max(1, int(math.ceil(buckets.d * w - 1e-9)))
    kept = heavy[::stride]
    return Buckets(d=buckets.d, assignments={j: list(buckets.assignments[j]) for j in kept})


def cross_block_frobenius_bound(
    D1: Sequence[float],
    S1: Sequence[float],
    sigma1: int,
    D2: Sequence[float],
    S2: Sequence[float],
    sigma2: int,
    d: int,
    lam: float | None = None,
) -> CrossBlockReport:
    D1 = np.asarray(D1, dtype=float)
    D2 = np.asarray(D2, dtype=float)
    S1 = np.asarray(S1, dtype=float)
    S2 = np.asarray(S2, dtype=float)
    if lam is None:
        lam = max(float(D1.sum()), float(D2.sum()))
    if D1.sum() > lam * (1 + 1e-12) or D2.sum() > lam * (1 + 1e-12):
        raise TsketchError("diagonal traces must not exceed lambda")
    distance = min(wrap_distance(sigma1 * f, sigma2 * g) for f in S1 for g in S2)

    F1 = np.column_stack([frequency_vector(sigma1 * f, d) for f in S1])
    F2 = np.column_stack([frequency_vector(sigma2 * g, d) for g in S2])
    block = np.sqrt(D1)[:, None] * (F1.conj().T @ F2) * np.sqrt(D2)[None, :]
    measured = float(np.linalg.norm(block))
    bound = math.inf if distance == 0.0 else INNER_PRODUCT_CONSTANT * lam / distance
    return CrossBlockReport(bound=bound, measured=measured, constant=INNER_PRODUCT_CONSTANT, distance=distance)
