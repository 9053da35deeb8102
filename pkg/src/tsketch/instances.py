from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from .errors import BadShape
from .toeplitz import FourierFactor, FrequencySet, SymToeplitz, vandermonde_synthesize

Family = Literal["circulant", "clustered", "random-vandermonde"]

CLUSTER_SIZE = 3
CLUSTER_GAP = 2


class InstanceSpec(BaseModel):
    family: Family = "circulant"
    d: int = Field(ge=2)
    k: int = Field(ge=1)
    sigma: float = Field(default=0.0, ge=0)
    seed: int = 0


@dataclass
class GeneratedInstance:
    matrix: SymToeplitz
    factor: FourierFactor | None


def _circulant(spec: InstanceSpec, rng: np.random.Generator) -> FourierFactor:
    slots = np.arange(1, spec.d // 2)
    if slots.size < spec.k:
        raise BadShape(f"d={spec.d} has only {slots.size} on-grid frequencies inside (0, 1/2)")
    chosen = np.sort(rng.choice(slots, size=spec.k, replace=False))
    return FourierFactor(
        d=spec.d,
        freqs=FrequencySet(chosen / spec.d),
        weights=rng.uniform(0.5, 1.5, size=spec.k),
    )


def _cluster_centers(spec: InstanceSpec, rng: np.random.Generator) -> np.ndarray:
    n_grid = spec.d // 2
    picked: list[int] = []
    for index in rng.permutation(n_grid):
        if all(abs(int(index) - other) >= CLUSTER_GAP for other in picked):
            picked.append(int(index))
        if len(picked) == spec.k:
            break
    if len(picked) < spec.k:
        raise BadShape(f"cannot place {spec.k} separated clusters at d={spec.d}")
    return (2 * np.sort(np.array(picked)) + 1) / (2.0 * spec.d)


def _clustered(spec: InstanceSpec, rng: np.random.Generator) -> FourierFactor:
    pairs: list[tuple[float, float]] = []
    spread = 1.0 / (4.0 * spec.d)
    for center in _cluster_centers(spec, rng):
        offsets = rng.uniform(-spread, spread, size=CLUSTER_SIZE)
        weights = rng.uniform(0.5, 1.5, size=CLUSTER_SIZE) / CLUSTER_SIZE
        pairs.extend(zip(center + offsets, weights))
    return FourierFactor.from_pairs(spec.d, pairs)


def _random_vandermonde(spec: InstanceSpec, rng: np.random.Generator) -> FourierFactor:
    freqs = np.sort(rng.uniform(0.0, 0.5, size=spec.k))
    return FourierFactor(d=spec.d, freqs=FrequencySet(freqs), weights=rng.uniform(0.5, 1.5, size=spec.k))


def gen_instance(spec: InstanceSpec) -> GeneratedInstance:
    rng = np.random.default_rng(spec.seed)
    if spec.family == "circulant":
        factor = _circulant(spec, rng)
    elif spec.family == "clustered":
        factor = _clustered(spec, rng)
    else:
        factor = _random_vandermonde(spec, rng)
    matrix = vandermonde_synthesize(factor)
    if spec.sigma == 0.0:
        return GeneratedInstance(matrix=matrix, factor=factor)
    # per-lag noise keeps the perturbation symmetric Toeplitz
    noise = rng.standard_normal(spec.d) * spec.sigma * matrix.frobenius_norm() / spec.d
    return GeneratedInstance(matrix=SymToeplitz(matrix.first_column + noise), factor=None)
