"""Built-in benchmark problems.

Small multi-objective problems used across the test suite and handy for CLI
experiments.  Each factory returns a fresh :class:`~elimfront.problem.MOProblem`.
"""

from __future__ import annotations

from .polyring import Polynomial, VariableSpace
from .problem import MOProblem

#: Expected per-asset revenue of the portfolio fixture.
PORTFOLIO_REVENUE = (0.10, 0.20, 0.15)

#: Covariance of the portfolio fixture.
PORTFOLIO_COVARIANCE = (
    (5e-4, 1e-4, 2e-4),
    (1e-4, 10e-4, 3e-4),
    (2e-4, 3e-4, 7e-4),
)

PORTFOLIO_BUDGET = 100.0


def portfolio() -> MOProblem:
    """Three-asset mean-variance portfolio selection.

    Minimize (-expected revenue, risk) subject to investing the whole
    budget: f1 = -a.x, f2 = x.B.x, with sum(x) = 100.
    """
    space = VariableSpace.from_groups(decision=("x1", "x2", "x3"))
    x = [Polynomial.variable(space, n) for n in space.names]

    f1 = Polynomial.zero(space)
    for ai, xi in zip(PORTFOLIO_REVENUE, x):
        f1 = f1 - ai * xi

    f2 = Polynomial.zero(space)
    for i in range(3):
        for j in range(3):
            f2 = f2 + PORTFOLIO_COVARIANCE[i][j] * x[i] * x[j]

    budget = x[0] + x[1] + x[2] - Polynomial.constant(space, PORTFOLIO_BUDGET)
    return MOProblem(space, (f1, f2), (budget,))


def paraboloid_with_planes() -> MOProblem:
    """Unconstrained tri-objective: one shifted paraboloid against two
    linear objectives pulling in different directions.

    f1 = (x1-3)^2 + (x2-2)^2, f2 = x1 + x2, f3 = x1 + 2 x2.
    """
    space = VariableSpace.from_groups(decision=("x1", "x2"))
    x1 = Polynomial.variable(space, "x1")
    x2 = Polynomial.variable(space, "x2")
    three = Polynomial.constant(space, 3.0)
    two = Polynomial.constant(space, 2.0)
    f1 = (x1 - three) * (x1 - three) + (x2 - two) * (x2 - two)
    f2 = x1 + x2
    f3 = x1 + 2.0 * x2
    return MOProblem(space, (f1, f2, f3))


def cubics_on_circle() -> MOProblem:
    """Bi-objective with a circle constraint.

    f1 = -x1^3 - x2^3, f2 = x1^2 - x2^2 on the unit circle centered at
    (0, -1): x1^2 + (x2+1)^2 - 1 = 0.
    """
    space = VariableSpace.from_groups(decision=("x1", "x2"))
    x1 = Polynomial.variable(space, "x1")
    x2 = Polynomial.variable(space, "x2")
    one = Polynomial.constant(space, 1.0)
    f1 = -1.0 * x1 * x1 * x1 - x2 * x2 * x2
    f2 = x1 * x1 - x2 * x2
    circle = x1 * x1 + (x2 + one) * (x2 + one) - one
    return MOProblem(space, (f1, f2), (circle,))


def three_shifted_squares() -> MOProblem:
    """Tri-objective over a single decision variable.

    f_i = (x - c_i)^2 for shifts c = (0, 1, 2); the front is a curve in R^3.
    """
    space = VariableSpace.from_groups(decision=("x",))
    x = Polynomial.variable(space, "x")
    objectives = []
    for shift in (0.0, 1.0, 2.0):
        c = Polynomial.constant(space, shift)
        objectives.append((x - c) * (x - c))
    return MOProblem(space, tuple(objectives))
