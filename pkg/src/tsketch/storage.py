from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .leverage import SamplingPlan
from .models import FactorFile, SamplingPlanFile, ToeplitzFile
from .toeplitz import FourierFactor, FrequencySet, SymToeplitz


def ensure_dir(path: Path) -> Path:
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path: Path, data: Any) -> None:
    ensure_dir(path.parent)
    path.write_text(dumps_json(data))


def dumps_json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def read_json(path: Path) -> Any:
    return json.loads(path.read_text())


def toeplitz_to_file(T: SymToeplitz) -> ToeplitzFile:
    return ToeplitzFile(d=T.d, first_column=[float(x) for x in T.first_column])


def toeplitz_from_file(model: ToeplitzFile) -> SymToeplitz:
    return SymToeplitz(np.array(model.first_column, dtype=float))


def factor_to_file(factor: FourierFactor) -> FactorFile:
    return FactorFile(
        d=factor.d,
        frequencies=list(factor.freqs.as_tuple()),
        weights=[float(a) for a in factor.weights],
    )


def factor_from_file(model: FactorFile) -> FourierFactor:
    return FourierFactor(
        d=model.d,
        freqs=FrequencySet(np.array(model.frequencies, dtype=float)),
        weights=np.array(model.weights, dtype=float),
    )


def plan_to_file(plan: SamplingPlan) -> SamplingPlanFile:
    return SamplingPlanFile(
        d=plan.d,
        m=plan.m,
        seed=plan.seed,
        indices=[int(i) for i in plan.indices],
        probabilities=[float(p) for p in plan.probabilities],
    )


def plan_from_file(model: SamplingPlanFile) -> SamplingPlan:
    probabilities = np.array(model.probabilities, dtype=float)
    return SamplingPlan(
        d=model.d,
        m=model.m,
        seed=model.seed,
        indices=np.array(model.indices, dtype=int),
        probabilities=probabilities,
        scales=1.0 / np.sqrt(model.m * probabilities),
    )


def load_toeplitz(path: Path) -> SymToeplitz:
    return toeplitz_from_file(ToeplitzFile.model_validate(read_json(path)))


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return format(value, ".17g")
    return str(value)


def rows_to_csv(columns: Sequence[str], rows: Iterable[dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[dict[str, Any]]) -> None:
    ensure_dir(path.parent)
    path.write_text(rows_to_csv(columns, rows))
