import json
import logging
from pathlib import Path

from rich.logging import RichHandler
from typer.testing import CliRunner

from tsketch.cli import app

FIXTURES = Path(__file__).parent / "fixtures"

runner = CliRunner()


def test_gen_then_recover(tmp_path: Path):
    matrix = tmp_path / "t.json"
    factor = tmp_path / "truth.json"
    result = runner.invoke(
        app, ["gen", "--family", "circulant", "--d", "64", "--k", "2", "--seed", "1", "--out", str(matrix), "--factor-out", str(factor)]
    )
    assert result.exit_code == 0, result.output
    assert json.loads(matrix.read_text())["d"] == 64
    assert len(json.loads(factor.read_text())["frequencies"]) == 2

    out = tmp_path / "recovered.json"
    result = runner.invoke(
        app,
        [
            "recover", "--in", str(matrix), "--k", "2", "--eps", "0.5", "--delta", "1e-3",
            "--mode", "greedy", "--seed", "7", "--r1", "2", "--r2", "1", "--m1", "16", "--m2", "32",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(out.read_text())
    assert set(payload) == {"factor", "ledger", "stage_errors", "config"}
    assert payload["ledger"]["distinct_lags"] <= 48
    assert payload["config"]["seed"] == 7


def test_recover_is_reproducible(tmp_path: Path):
    outputs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        result = runner.invoke(
            app, ["recover", "--in", str(FIXTURES / "three_by_three.json"), "--k", "1", "--r1", "1", "--r2", "1", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_baseline_on_fixture(tmp_path: Path):
    out = tmp_path / "baseline.json"
    result = runner.invoke(app, ["baseline", "--in", str(FIXTURES / "three_by_three.json"), "--k", "1", "--out", str(out)])
    assert result.exit_code == 0, result.output
    payload = json.loads(out.read_text())
    assert payload["psd"] is True
    assert abs(payload["toeplitz_rank1_error"] - payload["error"] - 0.1271) < 1e-3


def test_bad_parameters_exit_with_usage_error():
    result = runner.invoke(app, ["recover", "--in", str(FIXTURES / "three_by_three.json"), "--k", "1", "--mode", "random"])
    assert result.exit_code == 2
    result = runner.invoke(app, ["recover", "--in", str(FIXTURES / "bad_length.json"), "--k", "1"])
    assert result.exit_code == 2
    result = runner.invoke(app, ["verify", "--suite", "no_such_suite"])
    assert result.exit_code == 2


def test_exhaustive_explosion_exits_with_code_3(tmp_path: Path):
    matrix = tmp_path / "big.json"
    matrix.write_text(json.dumps({"d": 512, "first_column": [1.0] + [0.0] * 511}))
    result = runner.invoke(app, ["recover", "--in", str(matrix), "--k", "2", "--mode", "exhaustive"])
    assert result.exit_code == 3


def test_verify_and_levscores(tmp_path: Path):
    report = tmp_path / "verify.json"
    result = runner.invoke(app, ["verify", "--suite", "three_by_three", "--suite", "weyl", "--out", str(report)])
    assert result.exit_code == 0, result.output
    payload = json.loads(report.read_text())
    assert payload["passed"] is True
    assert [item["name"] for item in payload["results"]] == ["three_by_three", "weyl"]
    assert all("pass" in item for item in payload["results"])

    scores = tmp_path / "lev.json"
    result = runner.invoke(app, ["levscores", "--d", "256", "--r", "4", "--out", str(scores)])
    assert result.exit_code == 0, result.output
    payload = json.loads(scores.read_text())
    assert len(payload["tau"]) == 256
    assert payload["total"] < 256


def test_threads_from_environment(tmp_path: Path):
    out = tmp_path / "bench.csv"
    result = runner.invoke(
        app,
        ["bench", "--family", "circulant", "--d", "64,128", "--k", "1", "--out", str(out)],
        env={"TSKETCH_THREADS": "2"},
    )
    assert result.exit_code == 0, result.output
    assert out.read_text().startswith("d,k,eps,mode,distinct_lags,err,opt_err,ratio,wall_ms\n")

    result = runner.invoke(app, ["bench", "--d", "64", "--out", str(out)], env={"TSKETCH_THREADS": "zero"})
    assert result.exit_code == 2


def test_bench_accepts_projection_flag(tmp_path: Path):
    out = tmp_path / "bench.csv"
    result = runner.invoke(
        app, ["bench", "--family", "clustered", "--d", "64,128", "--k", "1", "--project-psd", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert len(out.read_text().splitlines()) == 3


def test_verbose_routes_module_logs_through_rich(tmp_path: Path):
    report = tmp_path / "verify.json"
    result = runner.invoke(app, ["--verbose", "verify", "--suite", "three_by_three", "--out", str(report)])
    assert result.exit_code == 0, result.output
    root = logging.getLogger()
    assert root.level == logging.DEBUG
    assert any(isinstance(handler, RichHandler) for handler in root.handlers)
