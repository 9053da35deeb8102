from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any

import typer
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.logging import RichHandler

from .bench import BenchSettings, _parse_dims, build_bench_md, run_bench, write_bench
from .errors import ExplosionGuard, TsketchError
from .instances import InstanceSpec, gen_instance
from .leverage import universal_tau_bounds
from .models import BaselineReport, LevScoresReport
from .recovery import RecoveryConfig, recover
from .spectral import BRUTE_FORCE_MAX_D, best_rank1_toeplitz_bruteforce, best_rank_k, eig_sym
from .storage import dumps_json, factor_to_file, load_toeplitz, toeplitz_to_file, write_json
from .verify import SUITES, check_leverage_domination, run_suites

app = typer.Typer(help="Sublinear-query low-rank approximation of symmetric Toeplitz matrices")
console = Console(stderr=True)


def _load_dotenv() -> None:
    import importlib
    import importlib.util

    if importlib.util.find_spec("dotenv") is None:
        return
    dotenv = importlib.import_module("dotenv")
    dotenv.load_dotenv()


def _threads() -> int | None:
    raw = os.getenv("TSKETCH_THREADS")
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise typer.BadParameter(f"TSKETCH_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise typer.BadParameter("TSKETCH_THREADS must be at least 1")
    return value


def _emit(payload: BaseModel | dict[str, Any], out: Path | None) -> None:
    data = payload.model_dump(by_alias=True) if isinstance(payload, BaseModel) else payload
    if out is None:
        typer.echo(dumps_json(data))
        return
    write_json(out, data)
    console.print(f"Wrote {out}")


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress at debug level")) -> None:
    _load_dotenv()
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


@app.command()
def gen(
    family: str = typer.Option("circulant", "--family", help="circulant, clustered or random-vandermonde"),
    d: int = typer.Option(..., "--d", help="Matrix dimension"),
    k: int = typer.Option(..., "--k", help="Number of frequencies or clusters"),
    sigma: float = typer.Option(0.0, "--sigma", help="Relative noise level"),
    seed: int = typer.Option(0, "--seed"),
    out: Path | None = typer.Option(None, "--out", help="Write the matrix here instead of stdout"),
    factor_out: Path | None = typer.Option(None, "--factor-out", help="Write the generating factor here"),
) -> None:
    """Generate a test instance."""
    try:
        instance = gen_instance(InstanceSpec(family=family, d=d, k=k, sigma=sigma, seed=seed))
    except (TsketchError, ValidationError, ValueError) as exc:
        raise typer.BadParameter(str(exc)) from exc

    _emit(toeplitz_to_file(instance.matrix), out)
    if factor_out is not None:
        if instance.factor is None:
            console.print("Noisy instance has no exact factor; skipping --factor-out")
        else:
            write_json(factor_out, factor_to_file(instance.factor).model_dump())


@app.command("recover")
def recover_cmd(
    input_path: Path = typer.Option(..., "--in", exists=True, dir_okay=False, help="Toeplitz matrix JSON"),
    k: int = typer.Option(..., "--k", help="Target rank"),
    eps: float = typer.Option(0.5, "--eps"),
    delta: float = typer.Option(1e-3, "--delta"),
    seed: int = typer.Option(0, "--seed"),
    mode: str = typer.Option("greedy", "--mode", help="greedy or exhaustive"),
    m1: int | None = typer.Option(None, "--m1", help="Stage-1 sample count"),
    m2: int | None = typer.Option(None, "--m2", help="Stage-2 sample count"),
    gamma: float | None = typer.Option(None, "--gamma", help="Spacing of the off-grid search net"),
    r1: int | None = typer.Option(None, "--r1", help="Number of centers per candidate"),
    r2: int | None = typer.Option(None, "--r2", help="Offsets per center on each side"),
    project_psd: bool = typer.Option(False, "--project-psd", help="Refit with nonnegative weights"),
    out: Path | None = typer.Option(None, "--out"),
) -> None:
    """Recover a low-rank Toeplitz approximation from sampled lags."""
    try:
        matrix = load_toeplitz(input_path)
        config = RecoveryConfig(
            k=k,
            eps=eps,
            delta=delta,
            seed=seed,
            mode=mode,
            m1=m1,
            m2=m2,
            gamma=gamma,
            r1=r1,
            r2=r2,
            project_psd=project_psd,
            threads=_threads(),
        )
        result = recover(matrix, config)
    except ExplosionGuard as exc:
        console.print(f"[red]{exc}[/red]")
        raise typer.Exit(code=3) from exc
    except (TsketchError, ValidationError, ValueError) as exc:
        raise typer.BadParameter(str(exc)) from exc

    console.print(
        f"Read {result.ledger.distinct_lags} of {matrix.d} lags, "
        f"{len(result.factor.freqs)} frequencies recovered"
    )
    _emit(result.to_output(), out)


@app.command()
def baseline(
    input_path: Path = typer.Option(..., "--in", exists=True, dir_okay=False, help="Toeplitz matrix JSON"),
    k: int = typer.Option(..., "--k", help="Target rank"),
    out: Path | None = typer.Option(None, "--out"),
) -> None:
    """Full-access spectral baseline."""
    try:
        matrix = load_toeplitz(input_path)
        summary = eig_sym(matrix)
        approx = best_rank_k(matrix, k)
    except (TsketchError, ValidationError, ValueError) as exc:
        raise typer.BadParameter(str(exc)) from exc

    report = BaselineReport(
        d=matrix.d,
        k=k,
        error=approx.error,
        eigenvalues=summary.eigenvalues.tolist(),
        psd=summary.is_psd,
    )
    if matrix.d <= BRUTE_FORCE_MAX_D:
        rank1 = best_rank1_toeplitz_bruteforce(matrix)
        report.toeplitz_rank1_error = rank1.error
        report.toeplitz_rank1_scale = rank1.scale
    _emit(report, out)


@app.command()
def verify(
    suite: list[str] = typer.Option(None, "--suite", help=f"One of: {', '.join(SUITES)}; repeatable"),
    seed: int = typer.Option(0, "--seed"),
    out: Path | None = typer.Option(None, "--out"),
) -> None:
    """Run numerical checks of the structural and sampling guarantees."""
    try:
        report = run_suites(suite or None, seed=seed)
    except TsketchError as exc:
        raise typer.BadParameter(str(exc)) from exc

    for result in report.results:
        status = "[green]pass[/green]" if result.passed else "[red]FAIL[/red]"
        console.print(f"{result.name}: {status} (measured {result.measured:.4g}, bound {result.bound:.4g})")
    _emit(report, out)
    if not report.passed:
        raise typer.Exit(code=1)


@app.command()
def levscores(
    d: int = typer.Option(..., "--d", help="Matrix dimension"),
    r: int = typer.Option(..., "--r", help="Subspace rank"),
    c_cor: float = typer.Option(1.0, "--c-cor", help="Constant of the polynomial tail bound"),
    check: int = typer.Option(0, "--check", help="Trials of the domination check against random subspaces"),
    seed: int = typer.Option(0, "--seed"),
    out: Path | None = typer.Option(None, "--out"),
) -> None:
    """Universal leverage-score bounds for Fourier subspaces."""
    try:
        bounds = universal_tau_bounds(d, r, c_cor=c_cor)
    except TsketchError as exc:
        raise typer.BadParameter(str(exc)) from exc

    report = LevScoresReport(d=d, r=r, total=bounds.total, constant=bounds.constant, tau=bounds.tau.tolist())
    if check > 0:
        report.domination = check_leverage_domination(seed=seed, trials=check, dims=(d,))
    _emit(report, out)


@app.command()
def bench(
    family: str = typer.Option("circulant", "--family"),
    d: str = typer.Option("256,1024,4096", "--d", help="Comma-separated dimensions"),
    k: int = typer.Option(2, "--k"),
    eps: float = typer.Option(0.5, "--eps"),
    delta: float = typer.Option(1e-3, "--delta"),
    seed: int = typer.Option(0, "--seed"),
    mode: str = typer.Option("greedy", "--mode"),
    sigma: float = typer.Option(0.0, "--sigma"),
    m1: int | None = typer.Option(None, "--m1"),
    m2: int | None = typer.Option(None, "--m2"),
    gamma: float | None = typer.Option(None, "--gamma"),
    r1: int | None = typer.Option(None, "--r1"),
    r2: int | None = typer.Option(None, "--r2"),
    project_psd: bool = typer.Option(False, "--project-psd", help="Refit with nonnegative weights"),
    out: Path = typer.Option(Path("bench.csv"), "--out", help="CSV output path"),
    summary: Path | None = typer.Option(None, "--summary", help="Also write a markdown summary"),
) -> None:
    """Sweep d and record distinct lags read against error."""
    try:
        settings = BenchSettings(
            family=family,
            dims=_parse_dims(d),
            k=k,
            eps=eps,
            delta=delta,
            mode=mode,
            seed=seed,
            sigma=sigma,
            m1=m1,
            m2=m2,
            gamma=gamma,
            r1=r1,
            r2=r2,
            project_psd=project_psd,
            threads=_threads(),
        )
        rows = run_bench(settings)
    except ExplosionGuard as exc:
        console.print(f"[red]{exc}[/red]")
        raise typer.Exit(code=3) from exc
    except (TsketchError, ValidationError, ValueError) as exc:
        raise typer.BadParameter(str(exc)) from exc

    write_bench(out, rows)
    console.print(f"Bench saved to: {out}")
    if summary is not None:
        summary.parent.mkdir(parents=True, exist_ok=True)
        summary.write_text(build_bench_md(settings, rows), encoding="utf-8")
    for row in rows:
        console.print(f"- d={row.d}: {row.distinct_lags} lags ({row.ratio:.4f}), err {row.err:.4g}")


if __name__ == "__main__":
    app()
