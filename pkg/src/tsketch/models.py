from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ToeplitzFile(BaseModel):
    d: int = Field(ge=1)
    first_column: list[float]

    @model_validator(mode="after")
    def _check_length(self) -> ToeplitzFile:
        if len(self.first_column) != self.d:
            raise ValueError(f"first_column has {len(self.first_column)} entries, expected {self.d}")
        return self


class FactorFile(BaseModel):
    d: int = Field(ge=1)
    frequencies: list[float] = Field(default_factory=list)
    weights: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_lengths(self) -> FactorFile:
        if len(self.frequencies) != len(self.weights):
            raise ValueError("frequencies and weights must have equal length")
        return self


class SamplingPlanFile(BaseModel):
    d: int
    m: int
    seed: int | None = None
    indices: list[int]
    probabilities: list[float]


class LedgerSummary(BaseModel):
    distinct_lags: int
    total_reads: int


class RecoveryOutput(BaseModel):
    factor: FactorFile
    ledger: LedgerSummary
    stage_errors: list[float]
    config: dict[str, Any] = Field(default_factory=dict)


class CheckResult(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    bound: float
    measured: float
    constant: float | None = None
    passed: bool = Field(alias="pass")
    details: dict[str, Any] = Field(default_factory=dict)


class VerifyReport(BaseModel):
    passed: bool
    results: list[CheckResult] = Field(default_factory=list)


class BaselineReport(BaseModel):
    d: int
    k: int
    error: float
    eigenvalues: list[float]
    psd: bool
    toeplitz_rank1_error: float | None = None
    toeplitz_rank1_scale: float | None = None


class LevScoresReport(BaseModel):
    d: int
    r: int
    total: float
    constant: float
    tau: list[float]
    domination: CheckResult | None = None
