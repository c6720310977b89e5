"""Hajek/Hoeffding decomposition of order-two difference kernels and variance predictions.

A kernel f maps a difference z = X_j - X_i to a vector in R^r and is always used in its
symmetrized form f^s(z) = (f(z) + f(-z)) / 2. Matrix-valued kernels are vectorized with
``symscatter.linalg.vech`` (row-major upper triangle, off-diagonals unscaled).

Two estimation paths are provided:
    plug-in      ``decompose`` estimates f0, f1, f2, Gamma_1 and Gamma_2 from one dataset
    population   ``population_components`` estimates them by Monte Carlo from a sampler
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Union

import numpy as np

from symscatter.constants import SchemeKind
from symscatter.errors import DecompositionError, ZeroVectorError
from symscatter.linalg import vech
from symscatter.pairs import (
    PairScheme,
    SeedLike,
    as_dataset,
    complete_pair_index,
    make_rng,
    pair_differences,
)
from symscatter.scatter.influence import tyler_influence_kernel

logger = logging.getLogger(__name__)

Sampler = Callable[[np.random.Generator, int], np.ndarray]

MIN_EMPIRICAL_REPS = 100


@dataclass(frozen=True)
class DifferenceKernel:
    """An arity-one map f evaluated row-wise on an (m, q) array of differences.

    Attributes:
        func: vectorized map from (m, q) to (m, r) or (m,)
        name: label used in logs and CLI output
    """

    func: Callable[[np.ndarray], np.ndarray]
    name: str = "kernel"

    @classmethod
    def pointwise(cls, func: Callable[[np.ndarray], np.ndarray], name: str = "kernel") -> "DifferenceKernel":
        """Wraps a function of a single q-vector."""

        def vectorized(points: np.ndarray) -> np.ndarray:
            return np.stack([np.atleast_1d(np.asarray(func(z), dtype=float)).ravel() for z in points])

        return cls(func=vectorized, name=name)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        values = np.asarray(self.func(points), dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != points.shape[0]:
            raise ValueError(
                f"Kernel {self.name} returned {values.shape[0]} rows for {points.shape[0]} inputs."
            )
        if not np.all(np.isfinite(values)):
            raise ValueError(f"Kernel {self.name} returned non-finite values.")
        return values

    def symmetrized(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return (self(points) + self(-points)) / 2


def matrix_kernel(func: Callable[[np.ndarray], np.ndarray], name: str = "kernel") -> DifferenceKernel:
    """Kernel from a map (m, q) -> (m, q, q) of symmetric matrices, vectorized with vech."""
    return DifferenceKernel(func=lambda points: vech(func(points)), name=name)


@dataclass
class Decomposition:
    """Plug-in Hoeffding decomposition of a kernel on one dataset.

    Attributes:
        f0: mean of f^s over all pairs, shape (r,)
        f1_values: f1(X_i) for every observation, shape (n, r), centered
        gamma1: sample covariance of the f1 values (ddof=1), shape (r, r)
        gamma2: mean of f2 f2' over all pairs, shape (r, r)
        f2_values: doubly-centered residuals on the complete pairs, shape (n(n-1)/2, r)
        n: number of observations
    """

    f0: np.ndarray
    f1_values: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    f2_values: np.ndarray
    n: int

    @property
    def dim(self) -> int:
        return self.f0.shape[0]

    def f2(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        """Residuals f2(X_i, X_j) for index arrays i != j, in either orientation."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        if np.any(i == j):
            raise ValueError("f2 is only defined on pairs of distinct observations.")
        return self.f2_values[complete_pair_index(self.n, np.minimum(i, j), np.maximum(i, j))]


@dataclass
class VariancePrediction:
    scheme: PairScheme
    n: int
    predicted: np.ndarray


@dataclass
class HajekTerms:
    """U = f0 + 2 * f1_mean + residual_mean for the pairs of one scheme."""

    f0: np.ndarray
    f1_mean: np.ndarray
    residual_mean: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.f0 + 2 * self.f1_mean + self.residual_mean


@dataclass
class PopulationComponents:
    """Monte-Carlo estimates of the population quantities of a kernel.

    Attributes:
        f0: E f^s(X_1 - X_2)
        gamma: Var f(X_1 - X_2) of the unsymmetrized kernel
        gamma_s: Var f^s(X_1 - X_2)
        gamma1: Var f1(X_1), from pairs of differences sharing one observation
        gamma2: Var f2(X_1, X_2), from double differences over four observations
        draws: number of independent draws per estimate
    """

    f0: np.ndarray
    gamma: np.ndarray
    gamma_s: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    draws: int


def _covariance(values: np.ndarray) -> np.ndarray:
    return np.atleast_2d(np.cov(values, rowvar=False, ddof=1))


def _symmetric(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2


def decompose(data: np.ndarray, kernel: DifferenceKernel) -> Decomposition:
    """Plug-in Hoeffding decomposition of the kernel over all pairs of the dataset.

    Args:
        data (np.ndarray): (n, q) observations, n >= 3
        kernel (DifferenceKernel): kernel, used symmetrized

    Raises:
        DecompositionError: if n < 3

    Returns:
        Decomposition: f0, f1, f2 and the covariance components
    """
    data = as_dataset(data)
    n = data.shape[0]
    if n < 3:
        raise DecompositionError(f"A decomposition needs n >= 3 observations, got n={n}.")
    pairs = PairScheme.complete().pairs(n)
    values = kernel.symmetrized(data[pairs[:, 1]] - data[pairs[:, 0]])
    f0 = values.mean(axis=0)

    sums = np.zeros((n, values.shape[1]))
    np.add.at(sums, pairs[:, 0], values)
    np.add.at(sums, pairs[:, 1], values)
    f1 = sums / (n - 1) - f0
    f2 = values - f0 - f1[pairs[:, 0]] - f1[pairs[:, 1]]

    gamma1 = _covariance(f1)
    gamma2 = _symmetric(f2.T @ f2 / f2.shape[0])
    logger.debug("Decomposed kernel %s on n=%s observations (r=%s)", kernel.name, n, f0.size)
    return Decomposition(f0=f0, f1_values=f1, gamma1=gamma1, gamma2=gamma2, f2_values=f2, n=n)


def u_statistic(data: np.ndarray, kernel: DifferenceKernel, scheme: PairScheme) -> np.ndarray:
    """Mean of f^s over the scheme's pair differences."""
    return kernel.symmetrized(pair_differences(data, scheme)).mean(axis=0)


def hajek_terms(dec: Decomposition, scheme: PairScheme) -> HajekTerms:
    """Splits the scheme's U-statistic on the decomposed dataset into its Hajek terms.

    Every index occurs in exactly 2d pairs of a balanced or randomized scheme (n - 1 for the
    complete one), so the first-order part is always twice the mean of f1.
    """
    pairs = scheme.pairs(dec.n)
    return HajekTerms(
        f0=dec.f0,
        f1_mean=dec.f1_values.mean(axis=0),
        residual_mean=dec.f2(pairs[:, 0], pairs[:, 1]).mean(axis=0),
    )


def predict_variance(dec: Decomposition, scheme: PairScheme, n: Optional[int] = None) -> VariancePrediction:
    """Predicts n Var(U) for the complete or balanced U-statistic.

    Complete:     4 Gamma_1 + 2 (n - 1)^-1 Gamma_2
    Balanced(d):  4 Gamma_1 + d^-1 Gamma_2

    Args:
        dec (Decomposition): provides Gamma_1 and Gamma_2
        scheme (PairScheme): complete or balanced
        n (int, optional): sample size of the predicted statistic. Defaults to dec.n.

    Raises:
        DecompositionError: for randomized schemes, which have no finite-n identity
        SchemeError: if the scheme is not admissible for n

    Returns:
        VariancePrediction: the prediction
    """
    n = dec.n if n is None else int(n)
    if scheme.kind == SchemeKind.RANDOMIZED:
        raise DecompositionError("No finite-n variance identity exists for randomized cycles.")
    scheme.validate(n)
    if scheme.kind == SchemeKind.COMPLETE:
        factor = 2.0 / (n - 1)
    else:
        factor = 1.0 / scheme.d
    return VariancePrediction(scheme=scheme, n=n, predicted=4 * dec.gamma1 + factor * dec.gamma2)


def empirical_u_variance(
    sampler: Sampler,
    kernel: DifferenceKernel,
    scheme: PairScheme,
    n: int,
    reps: int,
    seed: SeedLike,
) -> np.ndarray:
    """n times the sample covariance of U over reps simulated datasets.

    A randomized scheme is redrawn for every dataset, with its seed taken from the same stream.

    Args:
        sampler (Sampler): draws an (n, q) dataset from a generator
        kernel (DifferenceKernel): kernel, used symmetrized
        scheme (PairScheme): pairing design
        n (int): observations per dataset
        reps (int): number of datasets, >= 100
        seed (SeedLike): seed of the simulation stream

    Raises:
        ValueError: if reps < 100

    Returns:
        np.ndarray: (r, r) matrix
    """
    if reps < MIN_EMPIRICAL_REPS:
        raise ValueError(f"reps must be at least {MIN_EMPIRICAL_REPS}, got {reps}.")
    scheme.validate(n)
    rng = make_rng(seed)
    values = []
    for _ in range(reps):
        data = sampler(rng, n)
        rep_scheme = scheme
        if scheme.kind == SchemeKind.RANDOMIZED:
            rep_scheme = PairScheme.randomized(scheme.d, int(rng.integers(2**63 - 1)))
        values.append(u_statistic(data, kernel, rep_scheme))
    return n * _covariance(np.asarray(values))


def predict_scatter_covariance(dec_of_j: Decomposition, d: Optional[Union[int, float]] = None) -> np.ndarray:
    """Covariance 4 Gamma_1 + d^-1 Gamma_2 of the limit of sqrt(n)(Sigma(Q_n,d) - Sigma(Q)).

    Args:
        dec_of_j (Decomposition): decomposition of the vectorized influence kernel
        d (int or float, optional): number of balanced offsets or random cycles; None or inf
            gives the complete estimator. Defaults to None.

    Raises:
        ValueError: if d < 1

    Returns:
        np.ndarray: covariance in vech coordinates
    """
    if d is None or math.isinf(d):
        return 4 * dec_of_j.gamma1
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d}.")
    return 4 * dec_of_j.gamma1 + dec_of_j.gamma2 / d


def influence_decomposition(
    data: np.ndarray, influence: Union[DifferenceKernel, Callable[[np.ndarray], np.ndarray]]
) -> Decomposition:
    """Plug-in H1 and H2 of an influence function J, recentered empirically.

    Args:
        data (np.ndarray): (n, q) observations
        influence: a DifferenceKernel, or a function of a q-vector returning a symmetric matrix.
            A function raising ZeroVectorError at 0 is read as J(0) = 0.

    Returns:
        Decomposition: of vech J; f1_values are H1(X_i) and f2 are H2(X_i, X_j)
    """
    if isinstance(influence, DifferenceKernel):
        return decompose(data, influence)

    def vectorized_influence(z: np.ndarray) -> np.ndarray:
        try:
            return vech(influence(z))
        except ZeroVectorError:
            return np.zeros(z.size * (z.size + 1) // 2)

    return decompose(data, DifferenceKernel.pointwise(vectorized_influence, name="influence"))


def population_components(
    sampler: Sampler, kernel: DifferenceKernel, draws: int, rng: SeedLike = None
) -> PopulationComponents:
    """Monte-Carlo estimates of f0, Gamma, Gamma^s, Gamma_1 and Gamma_2 from independent draws.

    With X_1..X_4 independent blocks of draws:
        Gamma_1 = E[(f^s(X_1 - X_2) - f0)(f^s(X_1 - X_3) - f0)']
        Gamma_2 = E[g g'] / 4,  g = f^s(X_1-X_2) - f^s(X_1-X_3) - f^s(X_4-X_2) + f^s(X_4-X_3)
    where g is a sum of four uncorrelated f2 terms.

    Args:
        sampler (Sampler): draws an (m, q) sample from a generator
        kernel (DifferenceKernel): kernel
        draws (int): number of draws per block, >= 2
        rng (SeedLike, optional): generator or seed. Defaults to None.

    Returns:
        PopulationComponents: the estimates
    """
    if draws < 2:
        raise ValueError(f"draws must be at least 2, got {draws}.")
    rng = make_rng(rng)
    x1, x2, x3, x4 = (np.asarray(sampler(rng, draws), dtype=float) for _ in range(4))
    raw = kernel(x1 - x2)
    k12 = kernel.symmetrized(x1 - x2)
    k13 = kernel.symmetrized(x1 - x3)
    k42 = kernel.symmetrized(x4 - x2)
    k43 = kernel.symmetrized(x4 - x3)
    f0 = k12.mean(axis=0)
    gamma1 = _symmetric((k12 - f0).T @ (k13 - f0) / draws)
    g = k12 - k13 - k42 + k43
    gamma2 = _symmetric(g.T @ g / (4 * draws))
    return PopulationComponents(
        f0=f0,
        gamma=_covariance(raw),
        gamma_s=_covariance(k12),
        gamma1=gamma1,
        gamma2=gamma2,
        draws=draws,
    )


def _clipped_norm(points: np.ndarray) -> np.ndarray:
    return np.minimum(np.linalg.norm(points, axis=1), 2.0)


def _outer_product(points: np.ndarray) -> np.ndarray:
    return points[:, :, None] * points[:, None, :]


def _spatial_sign(points: np.ndarray) -> np.ndarray:
    s = np.einsum("ij,ij->i", points, points)
    outer = _outer_product(points)
    nonzero = s > 0
    outer[nonzero] /= s[nonzero, None, None]
    return outer


KERNELS: Dict[str, Callable[[], DifferenceKernel]] = {
    "clipped-norm": lambda: DifferenceKernel(_clipped_norm, name="clipped-norm"),
    "outer-product": lambda: matrix_kernel(_outer_product, name="outer-product"),
    "spatial-sign": lambda: matrix_kernel(_spatial_sign, name="spatial-sign"),
    "tyler-influence": lambda: DifferenceKernel(tyler_influence_kernel(), name="tyler-influence"),
}


def named_kernel(name: str) -> DifferenceKernel:
    """Looks up a kernel by its CLI name.

    Raises:
        ValueError: if the name is unknown
    """
    try:
        return KERNELS[name]()
    except KeyError:
        raise ValueError(f"Unknown kernel {name!r}; choose one of {sorted(KERNELS)}.")
