"""Submodule for M-functionals of scatter, Tyler's functional and their symmetrized versions"""

from symscatter.scatter.existence import ExistenceVerdict, check_existence
from symscatter.scatter.influence import (
    influence_spherical_m,
    influence_spherical_tyler,
    kappa_spherical,
    spherical_m_influence_kernel,
    tyler_influence_kernel,
)
from symscatter.scatter.rho import (
    RhoSpec,
    ScatterFunctional,
    WeightedSample,
    check_rho,
    rho_nu,
)
from symscatter.scatter.solvers import (
    SolverReport,
    functional_objective,
    objective_l0,
    objective_l_rho,
    psi_map,
    solve,
    solve_m_estimator,
    solve_tyler,
    stationarity_residual,
    tyler_map,
)
from symscatter.scatter.symmetrized import (
    averaged_randomized_estimator,
    difference_sample,
    symmetrized_scatter,
)

__all__ = [
    "ExistenceVerdict",
    "check_existence",
    "influence_spherical_m",
    "influence_spherical_tyler",
    "kappa_spherical",
    "spherical_m_influence_kernel",
    "tyler_influence_kernel",
    "RhoSpec",
    "ScatterFunctional",
    "WeightedSample",
    "check_rho",
    "rho_nu",
    "SolverReport",
    "functional_objective",
    "objective_l0",
    "objective_l_rho",
    "psi_map",
    "solve",
    "solve_m_estimator",
    "solve_tyler",
    "stationarity_residual",
    "tyler_map",
    "averaged_randomized_estimator",
    "difference_sample",
    "symmetrized_scatter",
]
