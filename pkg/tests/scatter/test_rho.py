import numpy as np
import pytest

from symscatter.constants import FunctionalKind
from symscatter.errors import DimensionMismatchError
from symscatter.scatter.rho import RhoSpec, ScatterFunctional, WeightedSample, check_rho, rho_nu


class TestRhoNu:
    def test_values(self):
        rho = rho_nu(1.0, 2)
        s = np.array([0.0, 1.0, 3.0])
        np.testing.assert_allclose(rho.rho(s), 3 * np.log(s + 1))
        np.testing.assert_allclose(rho.rho_prime(s), 3 / (s + 1))
        np.testing.assert_allclose(rho.rho_double_prime(s), -3 / (s + 1) ** 2)
        assert rho.psi_infinity == 3.0

    def test_psi_tends_to_psi_infinity(self):
        rho = rho_nu(2.5, 4)
        assert rho.psi(np.array([1e12]))[0] == pytest.approx(rho.psi_infinity)

    @pytest.mark.parametrize("nu, q", [(0.0, 2), (-1.0, 2), (1.0, 0)], ids=["nu zero", "nu negative", "q zero"])
    def test_rejects(self, nu, q):
        with pytest.raises(ValueError):
            rho_nu(nu, q)

    def test_check_rho_passes(self):
        check_rho(rho_nu(1.0, 10), 10)

    def test_check_rho_psi_infinity_too_small(self):
        rho = rho_nu(1.0, 2)
        with pytest.raises(ValueError, match="psi"):
            check_rho(rho, 3)

    def test_check_rho_decreasing_psi(self):
        rho = RhoSpec(
            rho=lambda s: -np.log(s + 1),
            rho_prime=lambda s: -1 / (s + 1),
            rho_double_prime=lambda s: 1 / (s + 1) ** 2,
            psi_infinity=5.0,
            name="decreasing",
        )
        with pytest.raises(ValueError, match="increasing"):
            check_rho(rho, 2)


class TestScatterFunctional:
    def test_m_type(self):
        functional = ScatterFunctional.m_type(rho_nu(1.0, 2))
        assert functional.kind == FunctionalKind.M

    def test_m_type_needs_rho(self):
        with pytest.raises(ValueError):
            ScatterFunctional(kind=FunctionalKind.M)

    def test_tyler(self):
        assert ScatterFunctional.tyler().rho is None


class TestWeightedSample:
    def test_uniform(self):
        sample = WeightedSample.uniform(np.ones((4, 2)))
        np.testing.assert_allclose(sample.weights, 0.25)
        assert sample.dim == 2
        assert sample.size == 4

    def test_one_dimensional_points(self):
        assert WeightedSample.uniform(np.arange(1.0, 4.0)).dim == 1

    def test_read_only(self):
        sample = WeightedSample.uniform(np.ones((2, 2)))
        with pytest.raises(ValueError):
            sample.points[0, 0] = 5.0

    @pytest.mark.parametrize(
        "weights, error",
        [
            ([0.5, 0.6], ValueError),
            ([1.5, -0.5], ValueError),
            ([1.0], DimensionMismatchError),
        ],
        ids=["sum above one", "negative weight", "shape mismatch"],
    )
    def test_rejects(self, weights, error):
        with pytest.raises(error):
            WeightedSample(points=np.ones((2, 2)), weights=np.array(weights))

    def test_transform(self):
        sample = WeightedSample.uniform(np.array([[1.0, 0.0], [0.0, 1.0]]))
        transformed = sample.transform(np.diag([2.0, 3.0]))
        np.testing.assert_array_equal(transformed.points, [[2.0, 0.0], [0.0, 3.0]])
