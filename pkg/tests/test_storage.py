from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from tsketch.leverage import draw_sampling_plan, universal_tau_bounds
from tsketch.models import FactorFile
from tsketch.storage import (
    factor_from_file,
    factor_to_file,
    load_toeplitz,
    plan_from_file,
    plan_to_file,
    read_json,
    rows_to_csv,
    write_json,
)
from tsketch.toeplitz import FourierFactor, FrequencySet

FIXTURES = Path(__file__).parent / "fixtures"


def test_load_fixture_matrix():
    T = load_toeplitz(FIXTURES / "three_by_three.json")
    assert T.d == 3
    assert T.first_column.tolist() == [2.0, 1.0, 0.0]


def test_length_mismatch_rejected():
    with pytest.raises(ValidationError):
        load_toeplitz(FIXTURES / "bad_length.json")


def test_factor_file_written_and_read(tmp_path: Path):
    factor = FourierFactor(d=16, freqs=FrequencySet(np.array([0.125, 0.3])), weights=np.array([1.5, -0.25]))
    path = tmp_path / "nested" / "factor.json"
    write_json(path, factor_to_file(factor).model_dump())
    restored = factor_from_file(FactorFile.model_validate(read_json(path)))
    assert restored.freqs.as_tuple() == factor.freqs.as_tuple()
    assert restored.weights.tolist() == factor.weights.tolist()


def test_plan_file_restores_scales():
    plan = draw_sampling_plan(universal_tau_bounds(32, 2), 10, seed=4)
    restored = plan_from_file(plan_to_file(plan))
    assert np.array_equal(restored.indices, plan.indices)
    assert np.allclose(restored.scales, plan.scales)


def test_csv_leaves_missing_cells_empty():
    text = rows_to_csv(["d", "opt_err", "ratio"], [{"d": 4096, "opt_err": None, "ratio": 0.5}])
    assert text == "d,opt_err,ratio\n4096,,0.5\n"
