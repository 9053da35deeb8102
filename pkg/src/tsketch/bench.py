from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

from .instances import Family, InstanceSpec, gen_instance
from .recovery import Mode, RecoveryConfig, evaluate_true_error, recover
from .spectral import best_rank_k
from .storage import write_csv

logger = logging.getLogger(__name__)

BENCH_COLUMNS = ["d", "k", "eps", "mode", "distinct_lags", "err", "opt_err", "ratio", "wall_ms"]
OPT_MAX_D = 1024
DEFAULT_M1 = 32
DEFAULT_M2 = 64


@dataclass
class BenchSettings:
    family: Family
    dims: list[int]
    k: int
    eps: float = 0.5
    delta: float = 1e-3
    mode: Mode = "greedy"
    seed: int = 0
    sigma: float = 0.0
    m1: int | None = None
    m2: int | None = None
    r1: int | None = None
    r2: int | None = None
    gamma: float | None = None
    project_psd: bool = False
    threads: int | None = None


@dataclass
class BenchRow:
    d: int
    k: int
    eps: float
    mode: str
    distinct_lags: int
    err: float
    opt_err: float | None
    ratio: float
    wall_ms: float

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def _parse_dims(value: str) -> list[int]:
    try:
        dims = [int(item) for item in value.split(",") if item.strip()]
    except ValueError as exc:
        raise ValueError("Dimensions must be a comma-separated list of integers, e.g. 256,1024") from exc
    if not dims or any(d < 2 for d in dims):
        raise ValueError("Dimensions must be integers of at least 2")
    return dims


def bench_config(settings: BenchSettings, d: int) -> RecoveryConfig:
    """Recovery settings for one sweep point.

    Sample counts stay fixed across the sweep so the fraction of lags read
    reflects growth in d; the search space defaults to one on-grid pair per center.
    """
    return RecoveryConfig(
        k=settings.k,
        eps=settings.eps,
        delta=settings.delta,
        mode=settings.mode,
        m1=settings.m1 or DEFAULT_M1,
        m2=settings.m2 or DEFAULT_M2,
        seed=settings.seed,
        gamma=settings.gamma or 1.0 / (2.0 * d),
        r1=settings.r1 if settings.r1 is not None else settings.k,
        r2=settings.r2 or 1,
        project_psd=settings.project_psd,
        threads=None,
    )


def run_one(settings: BenchSettings, d: int) -> BenchRow:
    instance = gen_instance(
        InstanceSpec(family=settings.family, d=d, k=settings.k, sigma=settings.sigma, seed=settings.seed)
    )
    config = bench_config(settings, d)
    started = time.perf_counter()
    result = recover(instance.matrix, config)
    wall_ms = (time.perf_counter() - started) * 1000.0
    err = evaluate_true_error(instance.matrix, result.factor)
    opt_err = best_rank_k(instance.matrix, settings.k).error if d <= OPT_MAX_D else None
    distinct = result.ledger.distinct_lags
    logger.info("d=%d: %d distinct lags, err=%.3g", d, distinct, err)
    return BenchRow(
        d=d,
        k=settings.k,
        eps=settings.eps,
        mode=settings.mode,
        distinct_lags=distinct,
        err=err,
        opt_err=opt_err,
        ratio=distinct / d,
        wall_ms=wall_ms,
    )


def run_bench(settings: BenchSettings) -> list[BenchRow]:
    workers = settings.threads or 1
    if workers <= 1:
        return [run_one(settings, d) for d in settings.dims]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda d: run_one(settings, d), settings.dims))


def write_bench(path: Path, rows: list[BenchRow]) -> None:
    write_csv(path, BENCH_COLUMNS, [row.as_dict() for row in rows])


def build_bench_md(settings: BenchSettings, rows: list[BenchRow]) -> str:
    lines = [
        "# Bench",
        "",
        "## Settings",
        f"- Family: {settings.family}",
        f"- k: {settings.k}",
        f"- Mode: {settings.mode}",
        f"- Noise: {settings.sigma}",
        "",
        "## Results",
        "| d | distinct lags | ratio | err | opt err | wall ms |",
        "| --- | --- | --- | --- | --- | --- |",
    ]
    for row in rows:
        opt = f"{row.opt_err:.4g}" if row.opt_err is not None else "-"
        lines.append(
            f"| {row.d} | {row.distinct_lags} | {row.ratio:.4f} | {row.err:.4g} | {opt} | {row.wall_ms:.1f} |"
        )
    ratios = [row.ratio for row in rows]
    decreasing = all(later < earlier for earlier, later in zip(ratios, ratios[1:]))
    lines.extend(["", "## Notes", f"- Read fraction strictly decreasing in d: {'yes' if decreasing else 'no'}"])
    return "\n".join(lines) + "\n"
