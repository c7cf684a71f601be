"""Linear optimization over probability vectors and density operators of
bounded purity, with quantum-channel and tomography applications."""

from .dual import solve_dual
from .errors import InfeasibleError, PurityBoundError, ValidationError
from .operators import max_expectation, max_fidelity_pure, min_energy, solve_vector
from .recursive import solve_recursive
from .simplex import Regime, SolveResult, check_feasible, oracle_solve


def solve(q, t, solver="dual", exact_purity=False):
    """Maximize p.q over probability vectors p with p.p <= t."""
    return solve_vector(q, t, solver, exact_purity)


__all__ = [
    "InfeasibleError",
    "PurityBoundError",
    "Regime",
    "SolveResult",
    "ValidationError",
    "check_feasible",
    "max_expectation",
    "max_fidelity_pure",
    "min_energy",
    "oracle_solve",
    "solve",
    "solve_dual",
    "solve_recursive",
]
