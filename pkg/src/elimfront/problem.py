"""Multi-objective problem statements and their first-order stationarity systems.

A problem is a list of polynomial objectives to minimize subject to polynomial
equality constraints.  From it we assemble the square of polynomial equations
whose solution set carries the Pareto front: stationarity of the weighted
Lagrangian in the decision variables, the constraints themselves, and one
bookkeeping relation per objective tying an objective-value variable ``s_i``
to ``f_i(x)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .polyring import (
    Polynomial,
    VariableSpace,
)

WEIGHT_MODE_CONVEX = "convex"
WEIGHT_MODE_EXPLICIT = "explicit"
_WEIGHT_MODES = (WEIGHT_MODE_CONVEX, WEIGHT_MODE_EXPLICIT)


class ProblemFormatError(ValueError):
    """Raised when a problem description is structurally invalid."""


@dataclass(frozen=True)
class MOProblem:
    """Minimize ``objectives`` over the zero set of ``constraints``.

    ``decision_space`` holds only decision variables; objectives and
    constraints are polynomials over that space.  ``weight_mode`` controls
    how scalarization weights enter the stationarity system:

    * ``"convex"`` — weights live on the simplex and the last one is
      eliminated up front via w_m = 1 - sum of the others, so only m-1
      weight variables appear (none for a single objective).
    * ``"explicit"`` — all m weights are independent variables.
    """

    decision_space: VariableSpace
    objectives: tuple[Polynomial, ...]
    constraints: tuple[Polynomial, ...] = ()
    weight_mode: str = WEIGHT_MODE_CONVEX

    def __post_init__(self) -> None:
        if len(self.objectives) < 2:
            raise ProblemFormatError("at least two objectives are required")
        if len(self.decision_space) == 0:
            raise ProblemFormatError("at least one decision variable is required")
        if self.weight_mode not in _WEIGHT_MODES:
            raise ProblemFormatError(
                f"weight_mode must be one of {_WEIGHT_MODES}, got {self.weight_mode!r}"
            )
        for poly in (*self.objectives, *self.constraints):
            if poly.space != self.decision_space:
                raise ProblemFormatError(
                    "objectives and constraints must share the decision space"
                )
        for poly in self.constraints:
            if poly.is_zero():
                raise ProblemFormatError("constraints must be nonzero polynomials")

    @property
    def n_objectives(self) -> int:
        return len(self.objectives)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    @property
    def decision_names(self) -> tuple[str, ...]:
        return self.decision_space.names

    def objective_values(self, point: Mapping[str, float]) -> tuple[float, ...]:
        """Evaluate every objective at a decision-variable assignment."""
        return tuple(f.evaluate(point) for f in self.objectives)

    def constraint_residuals(self, point: Mapping[str, float]) -> tuple[float, ...]:
        return tuple(g.evaluate(point) for g in self.constraints)


def _default_names(prefix: str, count: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(count))


def full_variable_space(
    problem: MOProblem,
    weight_names: Sequence[str] | None = None,
    multiplier_names: Sequence[str] | None = None,
    objective_names: Sequence[str] | None = None,
) -> VariableSpace:
    """Variable space of the stationarity system: (x, w, lambda, s).

    In convex weight mode only the first m-1 weights appear as variables.
    Name overrides let callers pick domain-specific symbols; the count must
    match what the mode requires.
    """
    m = problem.n_objectives
    n_w = m - 1 if problem.weight_mode == WEIGHT_MODE_CONVEX else m
    n_lam = problem.n_constraints

    w = tuple(weight_names) if weight_names is not None else _default_names("w", n_w)
    lam = (
        tuple(multiplier_names)
        if multiplier_names is not None
        else _default_names("lam", n_lam)
    )
    s = (
        tuple(objective_names)
        if objective_names is not None
        else _default_names("s", m)
    )
    if len(w) != n_w:
        raise ProblemFormatError(f"expected {n_w} weight names, got {len(w)}")
    if len(lam) != n_lam:
        raise ProblemFormatError(f"expected {n_lam} multiplier names, got {len(lam)}")
    if len(s) != m:
        raise ProblemFormatError(f"expected {m} objective names, got {len(s)}")
    return VariableSpace.from_groups(
        decision=problem.decision_names,
        weight=w,
        multiplier=lam,
        objective=s,
    )


def weight_polynomials(
    problem: MOProblem, space: VariableSpace
) -> tuple[Polynomial, ...]:
    """The m weights as polynomials over ``space``.

    Explicit mode returns the weight variables themselves; convex mode
    returns (w_1, ..., w_{m-1}, 1 - w_1 - ... - w_{m-1}).
    """
    m = problem.n_objectives
    w_vars = [Polynomial.variable(space, n) for n in space.weight_names]
    if problem.weight_mode == WEIGHT_MODE_EXPLICIT:
        return tuple(w_vars)
    last = Polynomial.constant(space, 1.0)
    for w in w_vars:
        last = last - w
    return (*w_vars, last)


def build_lagrangian(problem: MOProblem, space: VariableSpace) -> Polynomial:
    """Weighted Lagrangian sum(w_i f_i) - sum(lambda_k g_k) over ``space``."""
    weights = weight_polynomials(problem, space)
    lag = Polynomial.zero(space)
    for w_poly, f in zip(weights, problem.objectives):
        lag = lag + w_poly * f.embed(space)
    for lam_name, g in zip(space.multiplier_names, problem.constraints):
        lam = Polynomial.variable(space, lam_name)
        lag = lag - lam * g.embed(space)
    return lag


@dataclass(frozen=True)
class PFSystem:
    """Polynomial system whose real solutions project onto the Pareto front.

    Equations are ordered stationarity first (one per decision variable),
    then the constraints, then the objective relations ``s_i - f_i``.
    ``eliminated_names``/``kept_names`` record which variables elimination
    is meant to remove (x, w, lambda) and keep (s).
    """

    space: VariableSpace
    equations: tuple[Polynomial, ...]
    eliminated_names: tuple[str, ...]
    kept_names: tuple[str, ...]
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def n_equations(self) -> int:
        return len(self.equations)

    def equation_degrees(self) -> tuple[int, ...]:
        return tuple(eq.degree for eq in self.equations)

    def residual(self, point: Mapping[str, float]) -> float:
        """Max absolute equation value at a full-space point."""
        return max(abs(eq.evaluate(point)) for eq in self.equations)


def build_pf_system(
    problem: MOProblem,
    weight_names: Sequence[str] | None = None,
    multiplier_names: Sequence[str] | None = None,
    objective_names: Sequence[str] | None = None,
) -> PFSystem:
    """Assemble the stationarity system for ``problem``.

    The system has n + K + m equations in n + (m-1 or m) + K + m unknowns:
    dL/dx_j = 0, g_k = 0 and s_i - f_i(x) = 0.
    """
    space = full_variable_space(
        problem,
        weight_names=weight_names,
        multiplier_names=multiplier_names,
        objective_names=objective_names,
    )
    lag = build_lagrangian(problem, space)

    equations: list[Polynomial] = []
    for name in problem.decision_names:
        equations.append(lag.differentiate(name))
    for g in problem.constraints:
        equations.append(g.embed(space))
    for s_name, f in zip(space.objective_names, problem.objectives):
        s_var = Polynomial.variable(space, s_name)
        equations.append(s_var - f.embed(space))

    eliminated = (
        *space.decision_names,
        *space.weight_names,
        *space.multiplier_names,
    )
    # The front generically has dimension min(m - 1, decision degrees of
    # freedom), so its objective-space locus is cut out by m minus that many
    # independent relations.  The degree search keeps going until the
    # intersection supplies at least this many.
    m = problem.n_objectives
    dof = max(0, len(problem.decision_names) - problem.n_constraints)
    target_dim = m - min(m - 1, dof)
    diagnostics = {
        "n_decision": len(problem.decision_names),
        "n_weight_vars": len(space.weight_names),
        "n_multipliers": len(space.multiplier_names),
        "n_objectives": problem.n_objectives,
        "n_equations": len(equations),
        "equation_degrees": tuple(eq.degree for eq in equations),
        "weight_mode": problem.weight_mode,
        "target_intersection_dim": target_dim,
    }
    return PFSystem(
        space=space,
        equations=tuple(equations),
        eliminated_names=eliminated,
        kept_names=space.objective_names,
        diagnostics=diagnostics,
    )


# -- problem file I/O -------------------------------------------------------


def problem_to_dict(problem: MOProblem) -> dict:
    return {
        "decision_vars": list(problem.decision_names),
        "objectives": [f.to_term_list() for f in problem.objectives],
        "constraints": [g.to_term_list() for g in problem.constraints],
        "weight_mode": problem.weight_mode,
    }


def problem_from_dict(data: Mapping) -> MOProblem:
    try:
        names = data["decision_vars"]
        objective_data = data["objectives"]
    except (KeyError, TypeError) as exc:
        raise ProblemFormatError(f"missing required field: {exc}") from exc
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise ProblemFormatError("decision_vars must be a list of strings")
    constraint_data = data.get("constraints", [])
    mode = data.get("weight_mode", WEIGHT_MODE_CONVEX)

    try:
        space = VariableSpace.from_groups(decision=tuple(names))
    except ValueError as exc:
        raise ProblemFormatError(str(exc)) from exc
    try:
        objectives = tuple(
            Polynomial.from_term_list(space, tl) for tl in objective_data
        )
        constraints = tuple(
            Polynomial.from_term_list(space, tl) for tl in constraint_data
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemFormatError(f"bad term list: {exc}") from exc
    return MOProblem(
        decision_space=space,
        objectives=objectives,
        constraints=constraints,
        weight_mode=mode,
    )


def save_problem(problem: MOProblem, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(problem_to_dict(problem), fh, indent=2)
        fh.write("\n")


def load_problem(path: str) -> MOProblem:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProblemFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ProblemFormatError("problem file must contain a JSON object")
    return problem_from_dict(data)
