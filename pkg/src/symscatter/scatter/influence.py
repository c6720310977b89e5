"""Influence functions of scatter functionals at spherically symmetric distributions."""

from typing import Callable

import numpy as np

from symscatter.errors import ZeroVectorError
from symscatter.linalg import vech
from symscatter.scatter.rho import RhoSpec, WeightedSample


def _as_vector(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise ValueError(f"Expected a non-empty vector, got shape {y.shape}.")
    return y


def _check_kappa(kappa: float) -> None:
    if kappa <= -1:
        raise ValueError(f"kappa must exceed -1, got {kappa}.")


def kappa_spherical(sample: WeightedSample, rho: RhoSpec) -> float:
    """kappa = q^-1 sum_k w_k rho''(|y_k|^2) |y_k|^4."""
    s = np.einsum("ij,ij->i", sample.points, sample.points)
    return float(np.dot(sample.weights, rho.rho_double_prime(s) * s**2) / sample.dim)


def influence_spherical_m(y: np.ndarray, rho: RhoSpec, kappa: float) -> np.ndarray:
    """Influence function J(y) of the M-functional driven by rho at a spherical distribution.

    J(y) = (q+2)/(q+2+2 kappa) rho'(|y|^2) (y y' - |y|^2/q I) + (1+kappa)^-1 (rho'(|y|^2)|y|^2/q - 1) I,
    normalized so that the functional equals the identity at the distribution.

    Args:
        y (np.ndarray): point in R^q
        rho (RhoSpec): function driving the functional
        kappa (float): the distribution's kappa, see ``kappa_spherical``

    Raises:
        ValueError: if kappa <= -1

    Returns:
        np.ndarray: symmetric q x q matrix
    """
    _check_kappa(kappa)
    y = _as_vector(y)
    return _m_influence_stack(y[None, :], rho, kappa)[0]


def _m_influence_stack(points: np.ndarray, rho: RhoSpec, kappa: float) -> np.ndarray:
    q = points.shape[1]
    s = np.einsum("ij,ij->i", points, points)
    slope = rho.rho_prime(s)
    eye = np.eye(q)
    outer = points[:, :, None] * points[:, None, :] - (s / q)[:, None, None] * eye
    radial = ((slope * s / q - 1.0) / (1.0 + kappa))[:, None, None] * eye
    return (q + 2) / (q + 2 + 2 * kappa) * slope[:, None, None] * outer + radial


def influence_spherical_tyler(y: np.ndarray) -> np.ndarray:
    """Influence function J(y) = (q+2)(y y' / |y|^2 - I/q) of Tyler's shape functional.

    Raises:
        ZeroVectorError: if y is the zero vector
    """
    y = _as_vector(y)
    s = float(y @ y)
    if s == 0:
        raise ZeroVectorError("Tyler's influence function is undefined at 0.")
    q = y.size
    return (q + 2) * (np.outer(y, y) / s - np.eye(q) / q)


def _tyler_influence_stack(points: np.ndarray) -> np.ndarray:
    q = points.shape[1]
    s = np.einsum("ij,ij->i", points, points)
    nonzero = s > 0
    stack = np.zeros((points.shape[0], q, q))
    p = points[nonzero]
    stack[nonzero] = (q + 2) * (
        p[:, :, None] * p[:, None, :] / s[nonzero, None, None] - np.eye(q) / q
    )
    return stack


def spherical_m_influence_kernel(rho: RhoSpec, kappa: float) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized z -> vech J(z) of the M-functional, evaluated row-wise on an (m, q) array."""
    _check_kappa(kappa)

    def kernel(points: np.ndarray) -> np.ndarray:
        return vech(_m_influence_stack(np.asarray(points, dtype=float), rho, kappa))

    return kernel


def tyler_influence_kernel() -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized z -> vech J(z) of Tyler's functional with J(0) := 0."""

    def kernel(points: np.ndarray) -> np.ndarray:
        return vech(_tyler_influence_stack(np.asarray(points, dtype=float)))

    return kernel
