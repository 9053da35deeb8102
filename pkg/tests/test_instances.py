import numpy as np
import pytest
from pydantic import ValidationError

from tsketch.errors import BadShape
from tsketch.instances import InstanceSpec, gen_instance
from tsketch.spectral import eig_sym


def test_smallest_circulant_instance():
    instance = gen_instance(InstanceSpec(family="circulant", d=4, k=1, seed=0))
    assert instance.factor is not None
    assert instance.factor.freqs.as_tuple() == (0.25,)
    summary = eig_sym(instance.matrix)
    assert summary.is_psd
    assert int(np.sum(summary.eigenvalues > 1e-9)) == 2
    weight = instance.factor.weights[0]
    assert summary.eigenvalues[:2].tolist() == pytest.approx([4 * weight, 4 * weight])


def test_circulant_needs_enough_grid_slots():
    with pytest.raises(BadShape):
        gen_instance(InstanceSpec(family="circulant", d=6, k=3))


def test_clustered_frequencies_stay_near_centers():
    d = 64
    instance = gen_instance(InstanceSpec(family="clustered", d=d, k=3, seed=2))
    freqs = instance.factor.freqs.freqs
    assert len(freqs) == 9
    centers = (np.floor(freqs * d - 0.5) + 0.5) / d
    nearest = np.minimum(np.abs(freqs - centers), np.abs(freqs - centers - 1.0 / d))
    assert np.all(nearest <= 1.0 / (4 * d) + 1e-12)


def test_noise_drops_ground_truth():
    clean = gen_instance(InstanceSpec(family="random-vandermonde", d=32, k=2, seed=1))
    noisy = gen_instance(InstanceSpec(family="random-vandermonde", d=32, k=2, sigma=0.1, seed=1))
    assert noisy.factor is None
    assert not np.allclose(clean.matrix.first_column, noisy.matrix.first_column)
    assert np.all(np.isfinite(noisy.matrix.first_column))


def test_instances_are_seeded():
    spec = InstanceSpec(family="clustered", d=32, k=2, sigma=0.05, seed=8)
    assert np.array_equal(gen_instance(spec).matrix.first_column, gen_instance(spec).matrix.first_column)


def test_spec_validation():
    with pytest.raises(ValidationError):
        InstanceSpec(family="circulant", d=1, k=1)
    with pytest.raises(ValidationError):
        InstanceSpec(family="hankel", d=8, k=1)
