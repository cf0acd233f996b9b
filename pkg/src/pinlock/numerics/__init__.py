"""Self-contained numerical engine: eigensolvers and an LP solver."""
from .eigen import (
    SymMatrix,
    Spectrum,
    symmetric_eigen,
    lambda_max,
    general_eigenvalues,
)
from .simplex import (
    LinearProgram,
    LpSolution,
    solve_lp,
    OPTIMAL,
    INFEASIBLE,
    UNBOUNDED,
)

__all__ = [
    "SymMatrix", "Spectrum", "symmetric_eigen", "lambda_max", "general_eigenvalues",
    "LinearProgram", "LpSolution", "solve_lp", "OPTIMAL", "INFEASIBLE", "UNBOUNDED",
]
