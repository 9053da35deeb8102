import math

import numpy as np
import pytest

from tsketch.errors import BadShape, DimMismatch, ExplosionGuard
from tsketch.instances import InstanceSpec, gen_instance
from tsketch.leverage import SamplingPlan, full_plan
from tsketch.query import LagClient
from tsketch.recovery import (
    RecoveryConfig,
    SearchSpace,
    enumerate_candidates,
    evaluate_true_error,
    full_access_optimum,
    greedy_search,
    recover,
    solve_sampled_regression,
    stage1_constant,
)
from tsketch.toeplitz import FourierFactor, FrequencySet, SymToeplitz, vandermonde_synthesize, weight_vector


def _default_config(mode: str, seed: int) -> RecoveryConfig:
    return RecoveryConfig(k=2, r1=2, mode=mode, seed=seed)


def test_search_space_expand_and_merge():
    space = SearchSpace(d=16, r1=1, r2=2, gamma=1.0 / 128)
    assert space.centers.tolist() == pytest.approx([(2 * j + 1) / 32 for j in range(8)])
    expanded = space.expand(5 / 32)
    assert expanded == pytest.approx([5 / 32 - 2 / 128, 5 / 32 - 1 / 128, 5 / 32 + 1 / 128, 5 / 32 + 2 / 128])
    assert len(space.candidate([5 / 32, 5 / 32])) == 4
    # centers closer than gamma (r2 + 1) to the edge are pushed inward
    wide = SearchSpace(d=16, r1=1, r2=2, gamma=1.0 / 40)
    assert min(wide.expand(1 / 32)) == pytest.approx(1.0 / 40)
    assert space.doubled().r1 == 2


def test_search_space_rejects_wide_gamma():
    with pytest.raises(BadShape):
        SearchSpace(d=16, r1=1, r2=1, gamma=0.2)
    with pytest.raises(BadShape):
        SearchSpace(d=16, r1=1, r2=0, gamma=0.01)


def test_enumerate_candidates_modes():
    space = SearchSpace(d=16, r1=2, r2=1, gamma=1.0 / 64)
    exhaustive = list(enumerate_candidates(space, "exhaustive"))
    assert len(exhaustive) == len(set(exhaustive))
    assert len(exhaustive) <= math.comb(8 + 1, 2)
    greedy = list(enumerate_candidates(space, "greedy", base=[1 / 32]))
    assert len(greedy) == 8
    assert all(set(space.expand(1 / 32)) <= set(candidate) for candidate in greedy)


def test_enumerate_candidates_guard():
    space = SearchSpace(d=1024, r1=4, r2=1, gamma=1.0 / 4096)
    with pytest.raises(ExplosionGuard):
        next(enumerate_candidates(space, "exhaustive"))


def test_sampled_regression_recovers_exact_weights():
    d = 32
    factor = FourierFactor(d=d, freqs=FrequencySet(np.array([3 / d, 7 / d])), weights=np.array([1.2, 0.7]))
    T = vandermonde_synthesize(factor)
    plan = full_plan(d)
    result = solve_sampled_regression(factor.freqs, plan, weight_vector(d) * T.first_column)
    assert result.sampled_residual == pytest.approx(0.0, abs=1e-9)
    assert result.a.tolist() == pytest.approx([1.2, 0.7])
    assert not result.underdetermined
    with pytest.raises(DimMismatch):
        solve_sampled_regression(factor.freqs, plan, np.ones(d - 1))


def test_exact_recovery_on_circulant_instance():
    d = 256
    instance = gen_instance(InstanceSpec(family="circulant", d=d, k=2, seed=0))
    config = RecoveryConfig(k=2, mode="greedy", r1=2, r2=1, gamma=1.0 / (2 * d), m1=24, m2=32, seed=0)
    result = recover(instance.matrix, config)
    relative = evaluate_true_error(instance.matrix, result.factor) / instance.matrix.frobenius_norm()
    assert relative <= 1e-6
    assert result.ledger.distinct_lags <= d // 4


def test_greedy_matches_exhaustive_in_first_round():
    d = 32
    instance = gen_instance(InstanceSpec(family="clustered", d=d, k=1, sigma=0.05, seed=4))
    picks = []
    for mode in ("greedy", "exhaustive"):
        config = RecoveryConfig(k=1, mode=mode, r1=1, r2=2, gamma=1.0 / (8 * d), m1=128, seed=2).resolve(d)
        picks.append(stage1_constant(LagClient(instance.matrix), config.space, config))
    assert picks[0].S == picks[1].S
    assert picks[0].sampled_residual == pytest.approx(picks[1].sampled_residual)


def test_default_budgets_read_every_lag_at_small_d():
    d = 32
    T = gen_instance(InstanceSpec(family="clustered", d=d, k=2, sigma=0.05, seed=0)).matrix
    config = _default_config("exhaustive", 0)
    resolved = config.resolve(d)
    assert resolved.m1 == resolved.m2 == d
    assert recover(T, config).ledger.distinct_lags == d


def test_envelope_with_default_budgets():
    d = 32
    inside = 0
    for seed in range(100):
        T = gen_instance(InstanceSpec(family="clustered", d=d, k=2, sigma=0.05, seed=seed)).matrix
        config = _default_config("exhaustive", seed)
        result = recover(T, config)
        optimum = full_access_optimum(T, config.resolve(d).space)
        envelope = (1 + 3 * 0.5) * optimum.sampled_residual + 2e-3 * T.frobenius_norm()
        inside += evaluate_true_error(T, result.factor) <= envelope
    assert inside >= 90


def test_greedy_close_to_exhaustive():
    d = 32
    close = 0
    for seed in range(50):
        T = gen_instance(InstanceSpec(family="clustered", d=d, k=2, sigma=0.05, seed=100 + seed)).matrix
        greedy = evaluate_true_error(T, recover(T, _default_config("greedy", seed)).factor)
        exhaustive = evaluate_true_error(T, recover(T, _default_config("exhaustive", seed)).factor)
        close += greedy <= 1.1 * exhaustive + 1e-3 * T.frobenius_norm()
    assert close >= 45


def test_full_access_optimum_residual_is_true_error():
    d = 16
    T = gen_instance(InstanceSpec(family="random-vandermonde", d=d, k=2, seed=5)).matrix
    space = SearchSpace(d=d, r1=1, r2=1, gamma=1.0 / (4 * d))
    best = full_access_optimum(T, space)
    assert best.sampled_residual == pytest.approx(evaluate_true_error(T, best.factor(d)), rel=1e-9, abs=1e-12)


def test_query_log_replays_exactly():
    d = 128
    T = gen_instance(InstanceSpec(family="clustered", d=d, k=2, seed=9)).matrix
    config = RecoveryConfig(k=2, r1=2, r2=1, m1=20, m2=40, seed=3)
    first = recover(T, config)
    seen = set(first.ledger.read_lags)

    def guarded(lag: int) -> float:
        if lag not in seen:
            raise AssertionError(f"lag {lag} was not in the first run's log")
        return float(T.first_column[lag])

    second = recover(guarded, config, d=d)
    assert second.ledger.read_lags == seen
    assert second.to_output().model_dump() == first.to_output().model_dump()


def test_recover_is_deterministic_and_bounded():
    d = 128
    T = gen_instance(InstanceSpec(family="random-vandermonde", d=d, k=2, seed=1)).matrix
    config = RecoveryConfig(k=2, r1=2, r2=1, m1=16, m2=32, seed=7)
    first = recover(T, config)
    second = recover(T, config)
    assert first.to_output().model_dump() == second.to_output().model_dump()
    assert first.ledger.distinct_lags <= 16 + 32
    assert len(first.stage_errors) == 2
    assert first.config["m2"] == 32


def test_rank_zero_returns_empty_factor():
    result = recover(SymToeplitz(np.array([1.0, 0.5, 0.25])), RecoveryConfig(k=0))
    assert len(result.factor) == 0
    assert result.stage_errors == []
    assert result.ledger.distinct_lags == 0


def test_project_psd_gives_nonnegative_weights():
    d = 64
    T = gen_instance(InstanceSpec(family="clustered", d=d, k=2, sigma=0.1, seed=2)).matrix
    config = RecoveryConfig(k=2, r1=2, r2=2, m1=48, m2=96, seed=0, project_psd=True)
    result = recover(T, config)
    assert np.all(result.factor.weights >= 0.0)


def test_exhaustive_guard_before_any_read():
    T = SymToeplitz(np.ones(512))
    client = LagClient(T)
    with pytest.raises(ExplosionGuard):
        recover(client, RecoveryConfig(k=2, mode="exhaustive"))
    assert client.ledger.distinct_lags == 0


def test_resolved_defaults():
    resolved = RecoveryConfig(k=2, delta=1e-3).resolve(1024)
    assert resolved.r1 == 20
    assert resolved.r2 == math.ceil(10 + math.log2(1000))
    assert resolved.gamma == pytest.approx(1.0 / (8 * 1024 * resolved.r2))
    assert resolved.m2 == min(1024, 4 * resolved.m1)
    assert resolved.lev_rank <= 1024


def test_recovered_frequencies_stay_near_chosen_centers():
    d = 64
    r1, r2 = 2, 3
    gamma = 1.0 / (8 * d * r2)
    T = gen_instance(InstanceSpec(family="clustered", d=d, k=2, sigma=0.05, seed=11)).matrix
    result = recover(T, RecoveryConfig(k=2, r1=r1, r2=r2, gamma=gamma, m1=32, m2=64, seed=1))
    assert len(result.factor) <= 6 * r1 * r2
    assert len(result.centers) <= 3 * r1
    centers = np.array(result.centers)
    for freq in result.factor.freqs.freqs:
        assert np.min(np.abs(centers - freq)) <= (2 * r2 + 1) * gamma


def test_scaling_the_input_keeps_the_chosen_frequencies():
    d = 64
    T = gen_instance(InstanceSpec(family="clustered", d=d, k=2, seed=6)).matrix
    config = RecoveryConfig(k=2, mode="greedy", r1=2, r2=1, m1=48, m2=64, seed=5)
    base = recover(T, config)
    scaled = recover(T.scaled(4.0), config)
    assert scaled.factor.freqs.as_tuple() == base.factor.freqs.as_tuple()
    assert scaled.factor.weights.tolist() == pytest.approx((4.0 * base.factor.weights).tolist(), rel=1e-12)
    assert scaled.stage_errors == pytest.approx([4.0 * err for err in base.stage_errors], rel=1e-12)


def test_greedy_search_budget_one_is_full_access_optimum():
    d = 32
    T = gen_instance(InstanceSpec(family="clustered", d=d, k=1, seed=8)).matrix
    space = SearchSpace(d=d, r1=1, r2=2, gamma=1.0 / (8 * d))
    single = greedy_search(LagClient(T), space, full_plan(d), budget=1)
    assert single.S == full_access_optimum(T, space).S
    assert greedy_search(LagClient(T), space, full_plan(d), budget=0).S == ()


def test_second_stage_never_worsens_with_full_reads():
    d = 32
    for seed in range(5):
        T = gen_instance(InstanceSpec(family="clustered", d=d, k=2, sigma=0.05, seed=20 + seed)).matrix
        result = recover(T, RecoveryConfig(k=2, r1=1, r2=1, gamma=1.0 / (4 * d), m1=d, m2=d, seed=seed))
        first, second = result.stages
        assert second.system is not None
        assert second.sampled_residual <= float(np.linalg.norm(second.system.target)) + 1e-12
        stage1_error = evaluate_true_error(T, first.factor(d))
        assert evaluate_true_error(T, result.factor) <= stage1_error * (1 + 1e-9) + 1e-12


def test_leverage_rank_covers_stage_union():
    assert RecoveryConfig(k=1, r1=2, r2=3).resolve(1024).lev_rank == 72


def test_single_lag_matrix_rejected():
    with pytest.raises(BadShape):
        recover(SymToeplitz(np.array([1.0])), RecoveryConfig(k=1))


def test_repeated_draws_count_as_one_row():
    plan = SamplingPlan(
        d=8, m=4, seed=None, indices=np.array([1, 1, 2, 2]), probabilities=np.full(4, 1.0 / 8), scales=np.ones(4)
    )
    result = solve_sampled_regression([0.1, 0.2, 0.3], plan, np.ones(4))
    assert result.underdetermined
