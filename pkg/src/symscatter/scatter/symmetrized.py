"""Symmetrized scatter estimators: scatter functionals applied to pairwise differences."""

import logging
from typing import List

import numpy as np

from symscatter.constants import DEFAULT_MAX_ITER, DEFAULT_TOL
from symscatter.pairs import PairScheme, as_dataset, pair_differences
from symscatter.scatter.rho import ScatterFunctional, WeightedSample
from symscatter.scatter.solvers import SolverReport, solve

logger = logging.getLogger(__name__)


def difference_sample(data: np.ndarray, scheme: PairScheme) -> WeightedSample:
    """Uniformly weighted sample of the differences X_j - X_i over the scheme's pairs."""
    return WeightedSample.uniform(pair_differences(data, scheme))


def symmetrized_scatter(
    data: np.ndarray,
    scheme: PairScheme,
    functional: ScatterFunctional,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SolverReport:
    """Solves the functional on the empirical distribution of the scheme's pair differences.

    The sign of a difference does not enter the objectives, so the sample of X_j - X_i already
    represents its symmetrization. For a randomized scheme with d > 1 cycles the differences of all
    cycles are pooled into one sample; ``averaged_randomized_estimator`` averages per-cycle
    estimates instead.

    Args:
        data (np.ndarray): (n, q) observations
        scheme (PairScheme): pairing design
        functional (ScatterFunctional): M-type or Tyler
        tol (float, optional): solver tolerance. Defaults to 1e-9.
        max_iter (int, optional): solver iteration cap. Defaults to 500.

    Raises:
        SchemeError: if the scheme is not admissible for the data
        ScatterError: if the solver fails

    Returns:
        SolverReport: solver outcome
    """
    sample = difference_sample(data, scheme)
    logger.debug(
        "Solving %s functional on %s differences (%s scheme)",
        functional.kind.value,
        sample.size,
        scheme.label,
    )
    return solve(sample, functional, tol=tol, max_iter=max_iter)


def cycle_samples(data: np.ndarray, d: int, seed: int) -> List[WeightedSample]:
    """One uniformly weighted difference sample per cycle of ``PairScheme.randomized(d, seed)``."""
    data = as_dataset(data)
    pairs = PairScheme.randomized(d, seed).pairs(data.shape[0])
    return [
        WeightedSample.uniform(data[block[:, 1]] - data[block[:, 0]])
        for block in np.split(pairs, d)
    ]


def solve_cycles(
    data: np.ndarray,
    d: int,
    functional: ScatterFunctional,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
) -> List[SolverReport]:
    """Solves the functional separately on each of the d random cycles of differences."""
    return [
        solve(sample, functional, tol=tol, max_iter=max_iter)
        for sample in cycle_samples(data, d, seed)
    ]


def averaged_randomized_estimator(
    data: np.ndarray,
    d: int,
    functional: ScatterFunctional,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
) -> np.ndarray:
    """Average of the functional over d independent random cycles of differences.

    The l-th cycle is the l-th permutation of ``PairScheme.randomized(d, seed)``. The result is not
    shape-normalized.

    Args:
        data (np.ndarray): (n, q) observations, n >= 3
        d (int): number of cycles, >= 1
        functional (ScatterFunctional): M-type or Tyler
        tol (float, optional): solver tolerance. Defaults to 1e-9.
        seed (int, optional): seed of the permutation stream. Defaults to 0.
        max_iter (int, optional): solver iteration cap. Defaults to 500.

    Returns:
        np.ndarray: entrywise mean of the d estimates
    """
    reports = solve_cycles(data, d, functional, tol=tol, seed=seed, max_iter=max_iter)
    return average_estimates(reports)


def average_estimates(reports: List[SolverReport]) -> np.ndarray:
    average = np.mean([report.estimate for report in reports], axis=0)
    return (average + average.T) / 2
