import numpy as np
import pytest

from symscatter.errors import SchemeError
from symscatter.linalg import geodesic_distance, shape_normalize
from symscatter.pairs import PairScheme
from symscatter.scatter.rho import ScatterFunctional, rho_nu
from symscatter.scatter.symmetrized import (
    averaged_randomized_estimator,
    difference_sample,
    symmetrized_scatter,
)
from symscatter.sim.generate import DistributionSpec, generate_data


class TestDifferenceSample:
    def test_uniform_weights(self, gaussian_data):
        sample = difference_sample(gaussian_data, PairScheme.balanced(2))
        assert sample.size == 24
        np.testing.assert_allclose(sample.weights, 1 / 24)

    def test_invalid_scheme(self, gaussian_data):
        with pytest.raises(SchemeError):
            difference_sample(gaussian_data, PairScheme.balanced(6))


class TestSymmetrizedScatter:
    def test_minimal_sample_converges_for_tyler(self, rng):
        data = rng.standard_normal((4, 3))
        report = symmetrized_scatter(data, PairScheme.complete(), ScatterFunctional.tyler())
        assert report.converged
        assert np.linalg.det(report.estimate) == pytest.approx(1.0, abs=1e-10)

    def test_location_free(self, gaussian_data):
        functional = ScatterFunctional.m_type(rho_nu(1.0, 3))
        shifted = gaussian_data + np.array([5.0, -2.0, 100.0])
        np.testing.assert_allclose(
            symmetrized_scatter(shifted, PairScheme.complete(), functional).estimate,
            symmetrized_scatter(gaussian_data, PairScheme.complete(), functional).estimate,
            rtol=1e-7,
        )

    def test_elliptical_shape(self):
        scatter = np.array([[2.0, 0.6], [0.6, 1.0]])
        spec = DistributionSpec.from_dict({"kind": "elliptical-t", "df": 5, "scatter": scatter.tolist()})
        data = generate_data(spec, 400, 2, np.random.default_rng(8))
        estimate = symmetrized_scatter(data, PairScheme.complete(), ScatterFunctional.tyler()).estimate
        assert geodesic_distance(estimate, shape_normalize(scatter)) < 0.25


class TestAveragedRandomizedEstimator:
    def setup_method(self):
        self.functional = ScatterFunctional.m_type(rho_nu(1.0, 3))

    def test_single_cycle_matches_randomized_scheme(self, gaussian_data):
        averaged = averaged_randomized_estimator(gaussian_data, 1, self.functional, seed=9)
        pooled = symmetrized_scatter(gaussian_data, PairScheme.randomized(1, 9), self.functional).estimate
        np.testing.assert_allclose(averaged, pooled, rtol=1e-12)

    def test_average_is_positive_definite(self, gaussian_data):
        averaged = averaged_randomized_estimator(gaussian_data, 4, self.functional, seed=2)
        assert np.all(np.linalg.eigvalsh(averaged) > 0)

    def test_reproducible(self, gaussian_data):
        np.testing.assert_array_equal(
            averaged_randomized_estimator(gaussian_data, 3, self.functional, seed=5),
            averaged_randomized_estimator(gaussian_data, 3, self.functional, seed=5),
        )

    def test_needs_three_points(self):
        with pytest.raises(SchemeError):
            averaged_randomized_estimator(np.eye(2), 1, ScatterFunctional.tyler(), seed=0)


@pytest.mark.slow
def test_off_diagonal_blocks_shrink_for_independent_blocks():
    functional = ScatterFunctional.m_type(rho_nu(1.0, 5))
    medians = []
    for n in (100, 400, 1600):
        rng = np.random.default_rng(n)
        norms = []
        for _ in range(100):
            first = rng.standard_exponential((n, 2))
            second = rng.standard_t(3, size=(n, 3))
            estimate = symmetrized_scatter(
                np.hstack([first, second]), PairScheme.balanced(10), functional
            ).estimate
            norms.append(np.linalg.norm(estimate[:2, 2:]))
        medians.append(np.median(norms))
    assert medians[0] > medians[1] > medians[2]
