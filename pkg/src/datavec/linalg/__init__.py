"""Exact linear-algebra kernels: LP and ILP feasibility, Hermite normal form."""

from .hnf import (SubgroupOracle, coefficient_bounds, det, hnf, is_whole_lattice, lattice_basis, matmul,
                  solve_hnf, subgroup_member, xgcd)
from .ilp import (IlpInstance, SearchLimitExceeded, ilp_feasible, lattice_feasible,
                  minimal_solution_cap, solution_ok)
from .simplex import LinearSystem, SolverStats, cone_combination, lp_feasible

__all__ = [
    "IlpInstance", "LinearSystem", "SearchLimitExceeded", "SolverStats", "SubgroupOracle",
    "coefficient_bounds", "cone_combination", "det", "hnf", "is_whole_lattice", "lattice_basis", "ilp_feasible", "lattice_feasible", "lp_feasible", "matmul",
    "minimal_solution_cap", "solution_ok", "solve_hnf", "subgroup_member", "xgcd",
]
