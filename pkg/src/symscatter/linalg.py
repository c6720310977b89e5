"""Dense symmetric / SPD matrix primitives used by the scatter solvers and the experiment harness.

Matrices are plain ``numpy.ndarray`` objects. ``as_sym_matrix`` and ``as_spd_matrix`` are the
construction-time checks standing in for the SymMatrix / SpdMatrix types: they return a copy
with exactly symmetric entries, or raise.
"""

from typing import Tuple

import numpy as np
import scipy.linalg

from symscatter.errors import DimensionMismatchError, NotPositiveDefiniteError

SYMMETRY_TOL = 1e-10


def as_sym_matrix(m: np.ndarray, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Validates a square matrix as symmetric and returns an exactly symmetric copy.

    Args:
        m (np.ndarray): candidate q x q matrix
        tol (float, optional): relative asymmetry tolerance. Defaults to 1e-10.

    Raises:
        DimensionMismatchError: if m is not a square 2d array
        ValueError: if m is not symmetric within tol or has non-finite entries

    Returns:
        np.ndarray: (m + m.T) / 2 as float64
    """
    m = np.array(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatchError(f"Expected a non-empty square matrix, got shape {m.shape}.")
    if not np.all(np.isfinite(m)):
        raise ValueError("Matrix has non-finite entries.")
    scale = max(np.abs(m).max(), 1.0)
    if np.abs(m - m.T).max() > tol * scale:
        raise ValueError("Matrix is not symmetric.")
    return (m + m.T) / 2


def spd_factorize(m: np.ndarray) -> np.ndarray:
    """Computes the lower Cholesky factor L with L @ L.T == m.

    Args:
        m (np.ndarray): symmetric q x q matrix

    Raises:
        NotPositiveDefiniteError: if a pivot is not strictly positive

    Returns:
        np.ndarray: lower triangular factor
    """
    m = as_sym_matrix(m)
    try:
        factor = scipy.linalg.cholesky(m, lower=True)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"Matrix is not positive definite: {e}")
    if np.any(np.diag(factor) <= 0):
        raise NotPositiveDefiniteError("Matrix is not positive definite: non-positive pivot.")
    return factor


def as_spd_matrix(m: np.ndarray) -> np.ndarray:
    """Validates a matrix as symmetric positive definite and returns an exactly symmetric copy."""
    m = as_sym_matrix(m)
    spd_factorize(m)
    return m


def log_det(m: np.ndarray) -> float:
    """Log-determinant of an SPD matrix from its Cholesky factor."""
    factor = spd_factorize(m)
    return float(2.0 * np.sum(np.log(np.diag(factor))))


def shape_normalize(m: np.ndarray) -> np.ndarray:
    """Returns det(m)^(-1/q) * m, the positive multiple of m with determinant one.

    Args:
        m (np.ndarray): SPD matrix

    Raises:
        NotPositiveDefiniteError: if m is not positive definite

    Returns:
        np.ndarray: shape matrix of m
    """
    m = as_sym_matrix(m)
    q = m.shape[0]
    return np.exp(-log_det(m) / q) * m


def eigen_sym(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix with eigenvalues in decreasing order.

    Args:
        m (np.ndarray): symmetric matrix

    Returns:
        tuple: (eigenvalues, eigenvectors) where eigenvectors[:, k] belongs to eigenvalues[k]
    """
    m = as_sym_matrix(m)
    values, vectors = scipy.linalg.eigh(m)
    return values[::-1], vectors[:, ::-1]


def spd_power(m: np.ndarray, power: float) -> np.ndarray:
    """Symmetric matrix power m^power of an SPD matrix (power may be negative or fractional)."""
    values, vectors = eigen_sym(as_spd_matrix(m))
    if np.any(values <= 0):
        raise NotPositiveDefiniteError("Matrix is not positive definite.")
    powered = (vectors * values**power) @ vectors.T
    return (powered + powered.T) / 2


def geodesic_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Affine-invariant geodesic distance between two SPD matrices.

    The eigenvalues of a^-1 b are taken from the symmetric-definite pencil (b, a), which is
    equivalent to a^-1/2 b a^-1/2 and always yields real positive values.

    Args:
        a (np.ndarray): SPD matrix
        b (np.ndarray): SPD matrix with the same dimension

    Raises:
        DimensionMismatchError: if a and b differ in shape
        NotPositiveDefiniteError: if either matrix is not positive definite

    Returns:
        float: sqrt(sum_j log(lambda_j)^2)
    """
    a = as_spd_matrix(a)
    b = as_spd_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"Cannot compare matrices of shapes {a.shape} and {b.shape}."
        )
    eigenvalues = scipy.linalg.eigvalsh(b, a)
    return float(np.sqrt(np.sum(np.log(eigenvalues) ** 2)))


def vech(m: np.ndarray) -> np.ndarray:
    """Row-major upper triangle of a symmetric matrix, off-diagonals unscaled.

    Also works on a stack of matrices with shape (..., q, q).
    """
    m = np.asarray(m, dtype=float)
    rows, cols = np.triu_indices(m.shape[-1])
    return m[..., rows, cols]


def unvech(v: np.ndarray, q: int) -> np.ndarray:
    """Inverse of ``vech`` for a single vector of length q(q+1)/2."""
    v = np.asarray(v, dtype=float)
    if v.shape != (q * (q + 1) // 2,):
        raise DimensionMismatchError(
            f"Expected a vector of length {q * (q + 1) // 2}, got shape {v.shape}."
        )
    m = np.zeros((q, q))
    rows, cols = np.triu_indices(q)
    m[rows, cols] = v
    m[cols, rows] = v
    return m
