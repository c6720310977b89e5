"""Fixed-point solvers for M-functionals of scatter and Tyler's functional.

Both solvers iterate a map Sigma -> F(Sigma) whose fixed points are the stationary points of
the respective objective. A step is accepted only if the objective does not increase; otherwise
the step towards F(Sigma) is halved. Convergence is measured by the whitened residual
||Sigma^-1/2 F(Sigma) Sigma^-1/2 - I||_F, which is affine invariant.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np
import scipy.linalg

from symscatter.constants import DEFAULT_MAX_ITER, DEFAULT_TOL, FunctionalKind
from symscatter.errors import (
    DegenerateSampleError,
    NotConvergedError,
    NotPositiveDefiniteError,
    ZeroVectorError,
)
from symscatter.linalg import as_spd_matrix, shape_normalize, spd_factorize
from symscatter.scatter.rho import RhoSpec, ScatterFunctional, WeightedSample

logger = logging.getLogger(__name__)

MIN_STEP = 2.0**-30
# relative slack for objective comparisons, below which differences are rounding noise
OBJECTIVE_SLACK = 1e-12


@dataclass
class SolverReport:
    """Outcome of a scatter solve.

    Attributes:
        estimate: the last accepted iterate
        iterations: number of accepted fixed-point steps
        residual: whitened stationarity residual at ``estimate``
        converged: whether ``residual`` reached the tolerance
        objective_trace: objective value at every accepted iterate, starting with the initial one
    """

    estimate: np.ndarray
    iterations: int
    residual: float
    converged: bool
    objective_trace: List[float] = field(default_factory=list)


@dataclass
class _State:
    sigma: np.ndarray
    objective: float
    target: np.ndarray
    whitened: np.ndarray


def _whiten(sigma: np.ndarray, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """Returns (L, Z, log det sigma) with L the Cholesky factor and Z = L^-1 Y^T."""
    factor = spd_factorize(sigma)
    z = scipy.linalg.solve_triangular(factor, points.T, lower=True)
    return factor, z, float(2.0 * np.sum(np.log(np.diag(factor))))


def _mahalanobis(z: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->j", z, z)


def objective_l_rho(sigma: np.ndarray, sample: WeightedSample, rho: RhoSpec) -> float:
    """L_rho(Sigma, Q) = sum_k w_k [rho(y_k' Sigma^-1 y_k) - rho(y_k' y_k)] + log det Sigma.

    Raises:
        NotPositiveDefiniteError: if sigma is not positive definite
    """
    _, z, logdet = _whiten(as_spd_matrix(sigma), sample.points)
    s = _mahalanobis(z)
    norms = np.einsum("ij,ij->i", sample.points, sample.points)
    return float(np.dot(sample.weights, rho.rho(s) - rho.rho(norms)) + logdet)


def objective_l0(sigma: np.ndarray, sample: WeightedSample) -> float:
    """Tyler's L_0(Sigma, Q) = q sum_k w_k log(y_k' Sigma^-1 y_k / y_k' y_k) + log det Sigma.

    Raises:
        ZeroVectorError: if the sample contains the zero vector
    """
    _require_nonzero(sample)
    _, z, logdet = _whiten(as_spd_matrix(sigma), sample.points)
    s = _mahalanobis(z)
    norms = np.einsum("ij,ij->i", sample.points, sample.points)
    return float(sample.dim * np.dot(sample.weights, np.log(s / norms)) + logdet)


def _require_nonzero(sample: WeightedSample) -> None:
    zero = ~np.any(sample.points != 0, axis=1)
    if np.any(zero):
        raise ZeroVectorError(
            f"Tyler's functional is undefined for zero vectors; found {int(zero.sum())}."
        )


def _m_evaluate(sigma: np.ndarray, sample: WeightedSample, rho: RhoSpec) -> _State:
    factor, z, logdet = _whiten(sigma, sample.points)
    s = _mahalanobis(z)
    norms = np.einsum("ij,ij->i", sample.points, sample.points)
    objective = float(np.dot(sample.weights, rho.rho(s) - rho.rho(norms)) + logdet)
    whitened = (z * (sample.weights * rho.rho_prime(s))) @ z.T
    target = factor @ whitened @ factor.T
    return _State(sigma, objective, (target + target.T) / 2, whitened)


def _tyler_evaluate(sigma: np.ndarray, sample: WeightedSample) -> _State:
    q = sample.dim
    factor, z, logdet = _whiten(sigma, sample.points)
    s = _mahalanobis(z)
    norms = np.einsum("ij,ij->i", sample.points, sample.points)
    objective = float(q * np.dot(sample.weights, np.log(s / norms)) + logdet)
    whitened = q * (z * (sample.weights / s)) @ z.T
    target = factor @ whitened @ factor.T
    return _State(sigma, objective, (target + target.T) / 2, whitened)


def psi_map(sigma: np.ndarray, sample: WeightedSample, rho: RhoSpec) -> np.ndarray:
    """Psi(Sigma) = sum_k w_k rho'(y_k' Sigma^-1 y_k) y_k y_k'."""
    return _m_evaluate(as_spd_matrix(sigma), sample, rho).target


def tyler_map(sigma: np.ndarray, sample: WeightedSample) -> np.ndarray:
    """T(Sigma) = q sum_k w_k y_k y_k' / (y_k' Sigma^-1 y_k)."""
    _require_nonzero(sample)
    return _tyler_evaluate(as_spd_matrix(sigma), sample).target


def stationarity_residual(state_whitened: np.ndarray) -> float:
    """Frobenius distance of a whitened fixed-point map from the identity."""
    return float(np.linalg.norm(state_whitened - np.eye(state_whitened.shape[0])))


def second_moment(sample: WeightedSample) -> np.ndarray:
    """Weighted second-moment matrix sum_k w_k y_k y_k'."""
    moment = (sample.points.T * sample.weights) @ sample.points
    return (moment + moment.T) / 2


def _initial(sample: WeightedSample) -> np.ndarray:
    moment = second_moment(sample)
    try:
        spd_factorize(moment)
    except NotPositiveDefiniteError:
        raise DegenerateSampleError(
            "The sample does not span R^q; its second-moment matrix is singular."
        )
    return moment


def _fixed_point(
    initial: np.ndarray,
    evaluate: Callable[[np.ndarray], _State],
    normalize: Callable[[np.ndarray], np.ndarray],
    tol: float,
    max_iter: int,
    label: str,
) -> SolverReport:
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}.")
    state = evaluate(initial)
    trace = [state.objective]
    iterations = 0
    while True:
        residual = stationarity_residual(state.whitened)
        logger.debug("%s iteration %s: objective=%.12g residual=%.3e", label, iterations, state.objective, residual)
        if residual <= tol:
            return SolverReport(state.sigma, iterations, residual, True, trace)
        if iterations >= max_iter:
            break
        try:
            spd_factorize(state.target)
        except NotPositiveDefiniteError:
            raise DegenerateSampleError(
                f"{label}: the fixed-point map lost rank after {iterations} iterations."
            )
        step = 1.0
        slack = OBJECTIVE_SLACK * max(1.0, abs(state.objective))
        while True:
            candidate = evaluate(normalize(state.sigma + step * (state.target - state.sigma)))
            if candidate.objective <= state.objective + slack:
                break
            step /= 2
            if step < MIN_STEP:
                report = SolverReport(state.sigma, iterations, residual, False, trace)
                logger.warning("%s stalled after %s iterations (residual %.3e)", label, iterations, residual)
                raise NotConvergedError(
                    f"{label}: no objective decrease found after {iterations} iterations.",
                    report=report,
                )
        state = candidate
        trace.append(state.objective)
        iterations += 1

    report = SolverReport(state.sigma, iterations, residual, False, trace)
    logger.warning("%s did not converge in %s iterations (residual %.3e)", label, max_iter, residual)
    raise NotConvergedError(
        f"{label}: residual {residual:.3e} above tolerance {tol:g} after {max_iter} iterations.",
        report=report,
    )


def solve_m_estimator(
    sample: WeightedSample,
    rho: RhoSpec,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SolverReport:
    """Minimizes L_rho(., Q) over SPD matrices by the fixed-point iteration Sigma <- Psi(Sigma).

    Args:
        sample (WeightedSample): the distribution Q
        rho (RhoSpec): function driving the M-functional
        tol (float, optional): whitened residual tolerance. Defaults to 1e-9.
        max_iter (int, optional): maximal number of accepted steps. Defaults to 500.

    Raises:
        DegenerateSampleError: if the sample or the map Psi is rank deficient
        NotConvergedError: if the tolerance is not reached within max_iter steps

    Returns:
        SolverReport: converged report
    """
    return _fixed_point(
        initial=_initial(sample),
        evaluate=lambda sigma: _m_evaluate(sigma, sample, rho),
        normalize=lambda sigma: sigma,
        tol=tol,
        max_iter=max_iter,
        label="M-estimator",
    )


def solve_tyler(
    sample: WeightedSample,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SolverReport:
    """Minimizes L_0(., Q) under det(Sigma) = 1 by Sigma <- shape(T(Sigma)).

    Args:
        sample (WeightedSample): the distribution Q, without zero vectors
        tol (float, optional): whitened residual tolerance. Defaults to 1e-9.
        max_iter (int, optional): maximal number of accepted steps. Defaults to 500.

    Raises:
        ZeroVectorError: if the sample contains the zero vector
        DegenerateSampleError: if the sample or the map T is rank deficient
        NotConvergedError: if the tolerance is not reached within max_iter steps

    Returns:
        SolverReport: converged report with det(estimate) = 1
    """
    _require_nonzero(sample)
    return _fixed_point(
        initial=shape_normalize(_initial(sample)),
        evaluate=lambda sigma: _tyler_evaluate(sigma, sample),
        normalize=shape_normalize,
        tol=tol,
        max_iter=max_iter,
        label="Tyler",
    )


def solve(
    sample: WeightedSample,
    functional: ScatterFunctional,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SolverReport:
    """Dispatches to the solver of the given functional."""
    if functional.kind == FunctionalKind.TYLER:
        return solve_tyler(sample, tol=tol, max_iter=max_iter)
    return solve_m_estimator(sample, functional.rho, tol=tol, max_iter=max_iter)


def functional_objective(
    sigma: np.ndarray, sample: WeightedSample, functional: ScatterFunctional
) -> float:
    """Objective minimized by the given functional."""
    if functional.kind == FunctionalKind.TYLER:
        return objective_l0(sigma, sample)
    return objective_l_rho(sigma, sample, functional.rho)


