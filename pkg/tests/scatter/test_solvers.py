import numpy as np
from scipy import optimize
import pytest

from symscatter.errors import (
    DegenerateSampleError,
    NotConvergedError,
    NotPositiveDefiniteError,
    ZeroVectorError,
)
from symscatter.linalg import shape_normalize
from symscatter.scatter import solvers
from symscatter.scatter.rho import ScatterFunctional, WeightedSample, rho_nu

TIGHT_TOL = 1e-11
EQUIVARIANCE_TOL = 10 * 1e-9


def random_transform(rng, q):
    u, _ = np.linalg.qr(rng.standard_normal((q, q)))
    v, _ = np.linalg.qr(rng.standard_normal((q, q)))
    singular = rng.uniform(1.0, 10.0, size=q)
    singular[0], singular[-1] = 1.0, 10.0
    return (u * singular) @ v.T


@pytest.fixture
def sample(rng):
    return WeightedSample.uniform(rng.standard_t(4, size=(40, 3)))


class TestObjectives:
    def test_identity_objective_is_zero(self, sample):
        assert solvers.objective_l_rho(np.eye(3), sample, rho_nu(1.0, 3)) == pytest.approx(0.0, abs=1e-12)

    def test_identity_tyler_objective_is_zero(self, sample):
        assert solvers.objective_l0(np.eye(3), sample) == pytest.approx(0.0, abs=1e-12)

    def test_objective_needs_positive_definite(self, sample):
        with pytest.raises(NotPositiveDefiniteError):
            solvers.objective_l_rho(np.diag([1.0, 1.0, 0.0]), sample, rho_nu(1.0, 3))

    def test_tyler_objective_rejects_zero_vector(self):
        sample = WeightedSample.uniform(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(ZeroVectorError):
            solvers.objective_l0(np.eye(2), sample)

    def test_tyler_objective_is_scale_free(self, sample):
        sigma = np.diag([1.0, 2.0, 0.5])
        assert solvers.objective_l0(sigma, sample) == pytest.approx(
            solvers.objective_l0(sigma, WeightedSample(sample.points * 3.0, sample.weights))
        )


class TestMEstimator:
    def setup_method(self):
        self.rho = rho_nu(1.0, 3)

    def test_converges(self, sample):
        report = solvers.solve_m_estimator(sample, self.rho)
        assert report.converged
        assert report.residual <= 1e-9
        np.testing.assert_allclose(solvers.psi_map(report.estimate, sample, self.rho), report.estimate, rtol=1e-7)

    def test_objective_is_non_increasing(self, sample):
        trace = np.asarray(solvers.solve_m_estimator(sample, self.rho).objective_trace)
        slack = 1e-12 * np.maximum(1.0, np.abs(trace[:-1]))
        assert np.all(np.diff(trace) <= slack)

    def test_minimizes_objective(self, sample, rng):
        estimate = solvers.solve_m_estimator(sample, self.rho).estimate
        best = solvers.objective_l_rho(estimate, sample, self.rho)
        for _ in range(10):
            a = 0.05 * rng.standard_normal((3, 3))
            perturbed = estimate + (a + a.T) / 2
            assert solvers.objective_l_rho(perturbed, sample, self.rho) >= best - 1e-12

    def test_equivariance(self, sample, rng):
        estimate = solvers.solve_m_estimator(sample, self.rho, tol=TIGHT_TOL).estimate
        for _ in range(20):
            b = random_transform(rng, 3)
            expected = b @ estimate @ b.T
            result = solvers.solve_m_estimator(sample.transform(b), self.rho, tol=TIGHT_TOL).estimate
            assert np.linalg.norm(result - expected) / np.linalg.norm(expected) <= EQUIVARIANCE_TOL

    def test_spherical_sample_gives_multiple_of_identity(self):
        points = np.vstack([np.eye(3), -np.eye(3), 2 * np.eye(3), -2 * np.eye(3)])
        estimate = solvers.solve_m_estimator(WeightedSample.uniform(points), self.rho).estimate
        np.testing.assert_allclose(estimate, estimate[0, 0] * np.eye(3), atol=1e-9)

    def test_sign_flip_invariant_sample(self, rng):
        half = rng.standard_normal((20, 3))
        flipped = half * np.array([-1.0, 1.0, 1.0])
        sample = WeightedSample.uniform(np.vstack([half, flipped]))
        estimate = solvers.solve_m_estimator(sample, self.rho).estimate
        assert abs(estimate[0, 1]) <= EQUIVARIANCE_TOL
        assert abs(estimate[0, 2]) <= EQUIVARIANCE_TOL

    def test_negated_sample_gives_identical_estimate(self, sample):
        negated = WeightedSample(-sample.points, sample.weights)
        np.testing.assert_array_equal(
            solvers.solve_m_estimator(sample, self.rho).estimate,
            solvers.solve_m_estimator(negated, self.rho).estimate,
        )

    @pytest.mark.parametrize("nu", [0.5, 1.0, 4.0], ids=["nu=0.5", "nu=1", "nu=4"])
    def test_one_dimensional_matches_bisection(self, nu, rng):
        y = rng.standard_t(3, size=25)
        weights = rng.dirichlet(np.ones(25))
        squares = y**2

        def stationarity(variance):
            return np.sum(weights * (nu + 1) * squares / (squares / variance + nu)) - variance

        upper = 10 * (nu + 1) / nu * squares.max()
        expected = optimize.bisect(stationarity, 1e-6 * squares.min(), upper, xtol=1e-14, rtol=1e-15)
        sample = WeightedSample(y[:, None], weights)
        estimate = solvers.solve_m_estimator(sample, rho_nu(nu, 1), tol=TIGHT_TOL).estimate
        assert estimate.shape == (1, 1)
        assert estimate[0, 0] == pytest.approx(expected, abs=1e-8)

    def test_degenerate_sample(self):
        points = np.array([[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0]])
        with pytest.raises(DegenerateSampleError):
            solvers.solve_m_estimator(WeightedSample.uniform(points), rho_nu(1.0, 2))

    def test_not_converged_keeps_report(self, sample):
        with pytest.raises(NotConvergedError) as e:
            solvers.solve_m_estimator(sample, self.rho, max_iter=1)
        assert e.value.report is not None
        assert not e.value.report.converged
        assert e.value.report.iterations == 1

    def test_rejects_non_positive_tolerance(self, sample):
        with pytest.raises(ValueError):
            solvers.solve_m_estimator(sample, self.rho, tol=0.0)


class TestTyler:
    def test_unit_determinant(self, sample):
        report = solvers.solve_tyler(sample)
        assert report.converged
        assert np.linalg.det(report.estimate) == pytest.approx(1.0, abs=1e-10)

    def test_fixed_point(self, sample):
        estimate = solvers.solve_tyler(sample).estimate
        np.testing.assert_allclose(
            shape_normalize(solvers.tyler_map(estimate, sample)), estimate, rtol=1e-7
        )

    def test_equivariance(self, sample, rng):
        estimate = solvers.solve_tyler(sample, tol=TIGHT_TOL).estimate
        for _ in range(20):
            b = random_transform(rng, 3)
            expected = shape_normalize(b @ estimate @ b.T)
            result = solvers.solve_tyler(sample.transform(b), tol=TIGHT_TOL).estimate
            assert np.linalg.norm(result - expected) / np.linalg.norm(expected) <= EQUIVARIANCE_TOL

    @pytest.mark.parametrize("q", [2, 3, 5], ids=["q=2", "q=3", "q=5"])
    def test_standard_basis_gives_identity(self, q):
        report = solvers.solve_tyler(WeightedSample.uniform(np.eye(q)))
        np.testing.assert_allclose(report.estimate, np.eye(q), atol=1e-8)

    def test_radial_rescaling_does_not_matter(self, sample, rng):
        scales = rng.uniform(0.1, 10.0, size=(sample.size, 1))
        rescaled = WeightedSample(sample.points * scales, sample.weights)
        np.testing.assert_allclose(
            solvers.solve_tyler(rescaled).estimate, solvers.solve_tyler(sample).estimate, atol=1e-8
        )

    def test_zero_vector(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        with pytest.raises(ZeroVectorError):
            solvers.solve_tyler(WeightedSample.uniform(points))

    def test_objective_is_non_increasing(self, sample):
        trace = np.asarray(solvers.solve_tyler(sample).objective_trace)
        slack = 1e-12 * np.maximum(1.0, np.abs(trace[:-1]))
        assert np.all(np.diff(trace) <= slack)


class TestDispatch:
    def test_solve_dispatches(self, sample):
        tyler = solvers.solve(sample, ScatterFunctional.tyler())
        np.testing.assert_array_equal(tyler.estimate, solvers.solve_tyler(sample).estimate)
        m_type = solvers.solve(sample, ScatterFunctional.m_type(rho_nu(1.0, 3)))
        np.testing.assert_array_equal(m_type.estimate, solvers.solve_m_estimator(sample, rho_nu(1.0, 3)).estimate)

    def test_functional_objective(self, sample):
        assert solvers.functional_objective(np.eye(3), sample, ScatterFunctional.tyler()) == pytest.approx(0.0, abs=1e-12)

    def test_stationarity_residual(self):
        assert solvers.stationarity_residual(np.eye(2)) == 0.0
        assert solvers.stationarity_residual(np.diag([2.0, 1.0])) == pytest.approx(1.0)
