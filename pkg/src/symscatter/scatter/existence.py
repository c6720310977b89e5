"""Existence conditions for M-functionals and Tyler's functional on a weighted sample.

A minimizer exists iff no linear subspace W of dimension < q carries too much mass:
    M-type:  Q(W) < (psi(inf) - q + dim W) / psi(inf)   for 0 <= dim W < q
    Tyler:   Q({0}) = 0 and Q(W) < dim W / q             for 1 <= dim W < q
Small samples are checked exactly by enumerating the subspaces spanned by sample points;
larger ones get a few necessary checks only.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from symscatter.constants import (
    EXISTENCE_BRUTE_FORCE_CAP,
    MEMBERSHIP_TOL,
    ExistenceStatus,
    FunctionalKind,
)
from symscatter.scatter.rho import ScatterFunctional, WeightedSample

logger = logging.getLogger(__name__)


@dataclass
class SubspaceWitness:
    """A subspace whose sample mass reaches the existence bound.

    Attributes:
        dim: dimension of the subspace
        mass: sample mass lying in it, zero vectors included
        bound: the mass the functional tolerates for this dimension (strictly less is required)
        basis: orthonormal basis as rows, shape (dim, q)
        members: indices of the sample points in the subspace
    """

    dim: int
    mass: float
    bound: float
    basis: np.ndarray
    members: List[int] = field(default_factory=list)


@dataclass
class ExistenceVerdict:
    status: ExistenceStatus
    witness: Optional[SubspaceWitness] = None

    @property
    def ok(self) -> bool:
        return self.status != ExistenceStatus.FAIL


def mass_bound(functional: ScatterFunctional, dim: int, q: int) -> float:
    """Largest mass (exclusive) a subspace of the given dimension may carry."""
    if functional.kind == FunctionalKind.TYLER:
        return dim / q
    psi = functional.rho.psi_infinity
    return (psi - q + dim) / psi


def _members(points: np.ndarray, norms: np.ndarray, basis: np.ndarray, tol: float) -> np.ndarray:
    residual = points - (points @ basis.T) @ basis
    return np.linalg.norm(residual, axis=1) <= tol * np.maximum(norms, 1.0)


def _zero_mass_verdict(
    sample: WeightedSample, functional: ScatterFunctional, zero: np.ndarray
) -> Optional[ExistenceVerdict]:
    q = sample.dim
    zero_mass = float(sample.weights[zero].sum())
    if functional.kind == FunctionalKind.TYLER:
        if np.any(zero):
            bound = 0.0
        else:
            return None
    else:
        bound = mass_bound(functional, 0, q)
        if zero_mass < bound:
            return None
    witness = SubspaceWitness(0, zero_mass, bound, np.zeros((0, q)), np.flatnonzero(zero).tolist())
    return ExistenceVerdict(ExistenceStatus.FAIL, witness)


def _exact(sample: WeightedSample, functional: ScatterFunctional, tol: float) -> ExistenceVerdict:
    q = sample.dim
    points = sample.points
    norms = np.linalg.norm(points, axis=1)
    nonzero = np.flatnonzero(norms > 0)
    seen = set()
    for dim in range(1, q):
        bound = mass_bound(functional, dim, q)
        for subset in itertools.combinations(nonzero, dim):
            if np.linalg.matrix_rank(points[list(subset)], tol=tol) < dim:
                continue
            basis = np.linalg.qr(points[list(subset)].T)[0].T
            inside = _members(points, norms, basis, tol)
            key = (dim, tuple(np.flatnonzero(inside)))
            if key in seen:
                continue
            seen.add(key)
            mass = float(sample.weights[inside].sum())
            if mass >= bound:
                return ExistenceVerdict(
                    ExistenceStatus.FAIL,
                    SubspaceWitness(dim, mass, bound, basis, np.flatnonzero(inside).tolist()),
                )
    return ExistenceVerdict(ExistenceStatus.PASS)


def _heaviest_line(
    directions: np.ndarray, weights: np.ndarray, threshold: float, tol: float
) -> Tuple[float, np.ndarray]:
    """Heaviest set of unit directions with |cos| >= 1 - tol to one of them.

    Directions are bucketed on a grid coarser than the angular radius of a group, so a group spans
    at most 2^(q+1) cells counting sign flips. Only cells that could belong to a group of mass
    >= threshold are expanded into exact |cos| groups.
    """
    q = directions.shape[1]
    # wider than twice the angle sqrt(2 tol) of a group
    cell = 4.0 * np.sqrt(2.0 * tol)
    pivot = np.argmax(np.abs(directions) > cell, axis=1)
    signs = np.sign(directions[np.arange(directions.shape[0]), pivot])
    keys = np.floor(directions * signs[:, None] / cell).astype(np.int64)
    _, cells = np.unique(keys, axis=0, return_inverse=True)
    cells = np.asarray(cells).reshape(-1)
    cell_mass = np.bincount(cells, weights=weights)
    if threshold > 0:
        candidates = np.flatnonzero(cell_mass >= threshold / 2 ** (q + 1))
    else:
        candidates = np.array([np.argmax(cell_mass)])

    best_mass, best_members = 0.0, np.zeros(0, dtype=np.int64)
    for candidate in candidates:
        representative = directions[np.argmax(cells == candidate)]
        inside = np.flatnonzero(np.abs(directions @ representative) >= 1.0 - tol)
        mass = float(weights[inside].sum())
        if mass > best_mass:
            best_mass, best_members = mass, inside
    return best_mass, best_members


def _heuristic(sample: WeightedSample, functional: ScatterFunctional, tol: float) -> ExistenceVerdict:
    q = sample.dim
    points = sample.points
    norms = np.linalg.norm(points, axis=1)
    nonzero = norms > 0

    rank = np.linalg.matrix_rank(points[nonzero]) if np.any(nonzero) else 0
    if rank < q:
        if rank > 0:
            basis = np.linalg.svd(points[nonzero], full_matrices=False)[2][:rank]
        else:
            basis = np.zeros((0, q))
        return ExistenceVerdict(
            ExistenceStatus.FAIL,
            SubspaceWitness(rank, 1.0, mass_bound(functional, rank, q), basis, list(range(sample.size))),
        )

    if q > 1:
        directions = points[nonzero] / norms[nonzero, None]
        zero_mass = float(sample.weights[~nonzero].sum())
        bound = mass_bound(functional, 1, q)
        line_mass, on_line = _heaviest_line(directions, sample.weights[nonzero], bound - zero_mass, tol)
        if on_line.size and line_mass + zero_mass >= bound:
            members = np.flatnonzero(nonzero)[on_line]
            basis = points[members[:1]] / norms[members[:1], None]
            return ExistenceVerdict(
                ExistenceStatus.FAIL,
                SubspaceWitness(
                    1,
                    float(line_mass + zero_mass),
                    bound,
                    basis,
                    sorted(members.tolist() + np.flatnonzero(~nonzero).tolist()),
                ),
            )
    return ExistenceVerdict(ExistenceStatus.HEURISTIC_PASS)


def check_existence(
    sample: WeightedSample,
    functional: ScatterFunctional,
    brute_force_cap: int = EXISTENCE_BRUTE_FORCE_CAP,
    tol: float = MEMBERSHIP_TOL,
) -> ExistenceVerdict:
    """Checks whether the functional has a unique minimizer on the sample.

    Args:
        sample (WeightedSample): distribution to check
        functional (ScatterFunctional): M-type or Tyler
        brute_force_cap (int, optional): largest sample size checked exactly. Defaults to 25.
        tol (float, optional): relative distance under which a point lies in a subspace, and the
            bound on 1 - |cos| under which two directions share a line. Defaults to 1e-9.

    Returns:
        ExistenceVerdict: PASS or FAIL for exact checks, HEURISTIC_PASS or FAIL above the cap
    """
    zero = ~np.any(sample.points != 0, axis=1)
    verdict = _zero_mass_verdict(sample, functional, zero)
    if verdict is None:
        if sample.size <= brute_force_cap:
            verdict = _exact(sample, functional, tol)
        else:
            verdict = _heuristic(sample, functional, tol)
    logger.debug("Existence check on %s points: %s", sample.size, verdict.status.value)
    return verdict
