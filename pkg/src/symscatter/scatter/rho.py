"""Functions rho driving M-functionals of scatter, and weighted samples they are evaluated on."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from symscatter.constants import FunctionalKind
from symscatter.errors import DimensionMismatchError

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class RhoSpec:
    """A function rho on [0, inf) with its first two derivatives and psi(inf) = lim s rho'(s).

    All callables are applied elementwise to numpy arrays.
    """

    rho: Callable[[np.ndarray], np.ndarray]
    rho_prime: Callable[[np.ndarray], np.ndarray]
    rho_double_prime: Callable[[np.ndarray], np.ndarray]
    psi_infinity: float
    name: str = "rho"

    def psi(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return s * self.rho_prime(s)


def rho_nu(nu: float, q: int) -> RhoSpec:
    """The family rho_nu(s) = (nu + q) log(s + nu), the M-functional of a multivariate t_nu.

    Args:
        nu (float): degrees of freedom, > 0
        q (int): dimension

    Raises:
        ValueError: if nu <= 0 or q < 1

    Returns:
        RhoSpec: with psi(inf) = nu + q
    """
    if nu <= 0:
        raise ValueError(f"nu must be positive, got {nu}.")
    if q < 1:
        raise ValueError(f"q must be positive, got {q}.")
    c = nu + q
    return RhoSpec(
        rho=lambda s: c * np.log(s + nu),
        rho_prime=lambda s: c / (s + nu),
        rho_double_prime=lambda s: -c / (s + nu) ** 2,
        psi_infinity=float(c),
        name=f"rho_nu(nu={nu:g}, q={q})",
    )


def check_rho(rho: RhoSpec, q: int, grid: Optional[np.ndarray] = None) -> None:
    """Spot-checks the RhoSpec invariants for dimension q.

    psi must be strictly increasing on a grid of (0, inf) and q < psi(inf) < inf.

    Raises:
        ValueError: if an invariant fails
    """
    if grid is None:
        grid = np.logspace(-6, 6, 200)
    if not np.isfinite(rho.psi_infinity) or rho.psi_infinity <= q:
        raise ValueError(
            f"{rho.name}: psi(inf) = {rho.psi_infinity} must lie in ({q}, inf)."
        )
    if np.any(np.diff(rho.psi(grid)) <= 0):
        raise ValueError(f"{rho.name}: psi is not strictly increasing.")


@dataclass(frozen=True)
class ScatterFunctional:
    """Either an M-functional driven by ``rho`` or Tyler's functional (``rho`` is None)."""

    kind: FunctionalKind
    rho: Optional[RhoSpec] = None

    @classmethod
    def m_type(cls, rho: RhoSpec) -> "ScatterFunctional":
        return cls(kind=FunctionalKind.M, rho=rho)

    @classmethod
    def tyler(cls) -> "ScatterFunctional":
        return cls(kind=FunctionalKind.TYLER)

    def __post_init__(self):
        if self.kind == FunctionalKind.M and self.rho is None:
            raise ValueError("An M-functional needs a rho.")


@dataclass(frozen=True)
class WeightedSample:
    """Points y_1..y_m in R^q with nonnegative weights summing to one."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        weights = np.array(self.weights, dtype=float)
        if points.ndim != 2 or weights.shape != (points.shape[0],):
            raise DimensionMismatchError(
                f"Points of shape {points.shape} do not match weights of shape {weights.shape}."
            )
        if points.shape[0] == 0:
            raise ValueError("A weighted sample needs at least one point.")
        if np.any(weights < 0):
            raise ValueError("Weights must be nonnegative.")
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"Weights must sum to one, got {weights.sum()}.")
        if not np.all(np.isfinite(points)):
            raise ValueError("Points must be finite.")
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, points: np.ndarray) -> "WeightedSample":
        points = np.asarray(points, dtype=float)
        m = points.shape[0]
        return cls(points=points, weights=np.full(m, 1.0 / m))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def transform(self, b: np.ndarray) -> "WeightedSample":
        """The sample of B y_k with unchanged weights."""
        return WeightedSample(points=self.points @ np.asarray(b, dtype=float).T, weights=self.weights)
