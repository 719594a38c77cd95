"""Implicit algebraic descriptions of Pareto fronts for polynomial
multi-objective minimization problems, computed by numerical elimination on
Macaulay matrices and cross-checked by weighted-sum sampling."""

from .polyring import Polynomial, VariableSpace, monomials_up_to
from .problem import (
    MOProblem,
    PFSystem,
    ProblemFormatError,
    build_pf_system,
    load_problem,
    save_problem,
)
from .macaulay import MacaulayMatrix, build_macaulay, extend_macaulay, split_columns
from .eliminate import (
    DegreeCapExceeded,
    EliminantSystem,
    eliminate_system,
    equilibrate_variables,
    extract_eliminant,
    find_eliminant_degree,
    intersection_dimension,
    load_eliminant,
    numerical_rank,
    save_eliminant,
)
from .front import (
    NoConvergenceError,
    ParetoPoint,
    ZeroGradientError,
    newton_project,
    recover_decisions,
    recover_weights,
    tangency_certificate,
)
from .oracle import (
    dominance_filter,
    read_front_csv,
    sample_front,
    simplex_grid,
    weighted_sum_solve,
    write_front_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Polynomial",
    "VariableSpace",
    "monomials_up_to",
    "MOProblem",
    "PFSystem",
    "ProblemFormatError",
    "build_pf_system",
    "load_problem",
    "save_problem",
    "MacaulayMatrix",
    "build_macaulay",
    "extend_macaulay",
    "split_columns",
    "DegreeCapExceeded",
    "EliminantSystem",
    "eliminate_system",
    "equilibrate_variables",
    "extract_eliminant",
    "find_eliminant_degree",
    "intersection_dimension",
    "load_eliminant",
    "numerical_rank",
    "save_eliminant",
    "NoConvergenceError",
    "ParetoPoint",
    "ZeroGradientError",
    "newton_project",
    "recover_decisions",
    "recover_weights",
    "tangency_certificate",
    "dominance_filter",
    "read_front_csv",
    "sample_front",
    "simplex_grid",
    "weighted_sum_solve",
    "write_front_csv",
    "__version__",
]
