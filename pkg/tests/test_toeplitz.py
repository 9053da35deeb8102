import numpy as np
import pytest

from tsketch.errors import DimMismatch, EmptyFrequencySet, InvalidFrequency, TsketchError
from tsketch.toeplitz import (
    FourierFactor,
    FrequencySet,
    SymToeplitz,
    build_symmetric_fourier,
    collapse_matrix,
    frequency_vector,
    frobenius_via_weighted_column,
    inner_product_magnitude,
    real_collapsed_fourier,
    vandermonde_synthesize,
    weight_vector,
    wrap_distance,
)


def test_dense_and_entry():
    T = SymToeplitz(np.array([2.0, 1.0, 0.0]))
    expected = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]])
    assert np.array_equal(T.dense(), expected)
    assert T.entry(0, 2) == 0.0
    assert T.entry(2, 1) == 1.0


def test_frobenius_norm_matches_dense():
    rng = np.random.default_rng(3)
    for d in (1, 2, 7, 40):
        T = SymToeplitz(rng.standard_normal(d))
        assert T.frobenius_norm() == pytest.approx(np.linalg.norm(T.dense()), rel=1e-12)


def test_frequency_vector_wraps_modulo_one():
    expected = np.array([1.0, 1j, -1.0, -1j])
    assert np.allclose(frequency_vector(0.25, 4), expected, atol=1e-12)
    assert np.allclose(frequency_vector(1.25, 4), expected, atol=1e-12)


def test_symmetric_fourier_shape_and_collapse():
    freqs = [0.1, 0.3]
    F = build_symmetric_fourier(freqs, 5)
    assert F.shape == (5, 4)
    collapsed = F @ collapse_matrix(2)
    assert np.allclose(collapsed.imag, 0.0, atol=1e-12)
    assert np.allclose(collapsed.real, real_collapsed_fourier(freqs, 5), atol=1e-12)


def test_empty_frequency_set_rejected_for_fourier():
    with pytest.raises(EmptyFrequencySet):
        build_symmetric_fourier(FrequencySet(), 4)
    with pytest.raises(EmptyFrequencySet):
        real_collapsed_fourier([], 4)


def test_frequency_set_validation():
    assert len(FrequencySet()) == 0
    with pytest.raises(InvalidFrequency):
        FrequencySet(np.array([0.0, 0.2]))
    with pytest.raises(InvalidFrequency):
        FrequencySet(np.array([0.2, 0.5]))
    with pytest.raises(InvalidFrequency):
        FrequencySet(np.array([0.3, 0.2]))
    # all library errors are ValueErrors
    assert issubclass(InvalidFrequency, TsketchError)
    assert issubclass(TsketchError, ValueError)


def test_synthesis_matches_factorization():
    d = 9
    factor = FourierFactor(d=d, freqs=FrequencySet(np.array([0.05, 0.21, 0.4])), weights=np.array([1.0, -0.5, 2.0]))
    F = build_symmetric_fourier(factor.freqs, d)
    D = np.diag(np.concatenate([factor.weights, factor.weights]))
    dense = F @ D @ F.conj().T
    assert np.allclose(dense.imag, 0.0, atol=1e-10)
    assert np.allclose(vandermonde_synthesize(factor).dense(), dense.real, atol=1e-10)


def test_zero_factor_synthesizes_zero_matrix():
    T = vandermonde_synthesize(FourierFactor.zero(6))
    assert np.array_equal(T.first_column, np.zeros(6))


def test_from_pairs_sorts_and_merges():
    factor = FourierFactor.from_pairs(8, [(0.3, 1.0), (0.1, 2.0), (0.3 + 1e-14, 0.5)], tol=1e-12)
    assert factor.freqs.as_tuple() == pytest.approx((0.1, 0.3))
    assert factor.weights.tolist() == pytest.approx([2.0, 1.5])
    assert factor.total_weight() == pytest.approx(3.5)


def test_weight_vector_and_weighted_distance():
    assert weight_vector(1).tolist() == [1.0]
    w = weight_vector(4)
    assert w.tolist() == pytest.approx([2.0, np.sqrt(6.0), 2.0, np.sqrt(2.0)])

    rng = np.random.default_rng(0)
    A = SymToeplitz(rng.standard_normal(6))
    B = SymToeplitz(rng.standard_normal(6))
    assert frobenius_via_weighted_column(A, B) == pytest.approx(np.linalg.norm(A.dense() - B.dense()))
    with pytest.raises(DimMismatch):
        frobenius_via_weighted_column(A, SymToeplitz(np.ones(5)))


def test_inner_product_magnitude_matches_vectors():
    rng = np.random.default_rng(1)
    for _ in range(50):
        f, g = rng.uniform(-1.0, 1.0, size=2)
        d = int(rng.integers(1, 60))
        direct = abs(np.vdot(frequency_vector(g, d), frequency_vector(f, d)))
        assert inner_product_magnitude(f, g, d) == pytest.approx(direct, abs=1e-9)
    assert inner_product_magnitude(0.2, 1.2, 17) == 17.0


def test_wrap_distance():
    assert wrap_distance(0.05, 0.95) == pytest.approx(0.1)
    assert wrap_distance(0.3, 0.3) == 0.0
