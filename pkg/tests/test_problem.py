"""Problem model and stationarity-system assembly."""

import numpy as np
import pytest

from elimfront import fixtures
from elimfront.polyring import Polynomial, VariableSpace
from elimfront.problem import (
    MOProblem,
    ProblemFormatError,
    build_lagrangian,
    build_pf_system,
    full_variable_space,
    load_problem,
    problem_from_dict,
    problem_to_dict,
    save_problem,
)


@pytest.fixture
def all_problems():
    return {
        "portfolio": fixtures.portfolio(),
        "paraboloid": fixtures.paraboloid_with_planes(),
        "cubics": fixtures.cubics_on_circle(),
        "squares": fixtures.three_shifted_squares(),
    }


# -- validation -----------------------------------------------------------


def test_requires_two_objectives():
    space = VariableSpace.from_groups(decision=("x1",))
    f = Polynomial.variable(space, "x1")
    with pytest.raises(ProblemFormatError):
        MOProblem(space, (f,))


def test_rejects_foreign_space():
    a = VariableSpace.from_groups(decision=("x1",))
    b = VariableSpace.from_groups(decision=("y1",))
    with pytest.raises(ProblemFormatError):
        MOProblem(a, (Polynomial.variable(a, "x1"), Polynomial.variable(b, "y1")))


def test_rejects_zero_constraint():
    space = VariableSpace.from_groups(decision=("x1",))
    f = Polynomial.variable(space, "x1")
    with pytest.raises(ProblemFormatError):
        MOProblem(space, (f, f * f), (Polynomial.zero(space),))


# -- objective evaluation --------------------------------------------------


def test_portfolio_objective_values():
    prob = fixtures.portfolio()
    s = prob.objective_values({"x1": 18.18, "x2": 50.00, "x3": 31.82})
    assert s[0] == pytest.approx(-16.59, abs=0.005)
    assert s[1] == pytest.approx(4.74, abs=0.005)


def test_paraboloid_objective_values():
    prob = fixtures.paraboloid_with_planes()
    assert prob.objective_values({"x1": 3.0, "x2": 2.0}) == (0.0, 5.0, 7.0)


def test_squares_objective_values():
    prob = fixtures.three_shifted_squares()
    assert prob.objective_values({"x": 0.0}) == (0.0, 1.0, 4.0)


# -- stationarity system ----------------------------------------------------


def test_equation_count(all_problems):
    for prob in all_problems.values():
        system = build_pf_system(prob)
        n = len(prob.decision_names)
        expected = n + prob.n_constraints + prob.n_objectives
        assert system.n_equations == expected


def test_last_weight_substituted_away(all_problems):
    for prob in all_problems.values():
        system = build_pf_system(prob)
        m = prob.n_objectives
        weight_vars = system.space.weight_names
        assert len(weight_vars) == m - 1
        assert f"w{m}" not in system.space.names


def test_gradient_block_matches_lagrangian(all_problems):
    for prob in all_problems.values():
        system = build_pf_system(prob)
        space = system.space
        lag = build_lagrangian(prob, space)
        for i, name in enumerate(prob.decision_names):
            assert system.equations[i] == lag.differentiate(name)


def test_feasible_point_zeroes_constraint_and_objective_blocks(all_problems):
    rng = np.random.default_rng(3)
    for prob in all_problems.values():
        system = build_pf_system(prob)
        n = len(prob.decision_names)
        for _ in range(5):
            x = rng.uniform(-2, 2, size=n)
            if prob.n_constraints:  # project onto the budget plane fixtures use
                if prob is not None and prob.n_constraints == 1:
                    g = prob.constraints[0]
                    # only the portfolio constraint is linear; skip others
                    if g.degree != 1:
                        continue
                    shift = g.evaluate(dict(zip(prob.decision_names, x)))
                    x = x - shift / n
            point = dict(zip(prob.decision_names, x))
            s = prob.objective_values(point)
            full = dict(point)
            full.update({n_: 0.3 for n_ in system.space.weight_names})
            full.update({n_: -0.7 for n_ in system.space.multiplier_names})
            full.update(dict(zip(system.space.objective_names, s)))
            n_grad = n
            for eq in system.equations[n_grad + prob.n_constraints :]:
                assert abs(eq.evaluate(full)) <= 1e-9
            if prob.n_constraints and prob.constraints[0].degree == 1:
                for eq in system.equations[n_grad : n_grad + prob.n_constraints]:
                    assert abs(eq.evaluate(full)) <= 1e-9


def test_squares_equation_degrees():
    # the gradient equation collapses to degree one: the bilinear w-x terms
    # cancel under the convex-weight substitution
    system = build_pf_system(fixtures.three_shifted_squares())
    assert sorted(system.equation_degrees()) == [1, 2, 2, 2]


def test_expected_front_codimension(all_problems):
    expected = {"portfolio": 1, "paraboloid": 1, "cubics": 1, "squares": 2}
    for key, prob in all_problems.items():
        system = build_pf_system(prob)
        assert system.diagnostics["target_intersection_dim"] == expected[key], key


def test_name_overrides():
    prob = fixtures.portfolio()
    system = build_pf_system(
        prob, weight_names=("alpha",), objective_names=("u", "v")
    )
    assert "alpha" in system.space.names
    assert system.kept_names == ("u", "v")
    with pytest.raises(ProblemFormatError):
        full_variable_space(prob, weight_names=("a", "b"))


# -- serialization -----------------------------------------------------------


def test_round_trip_exact(all_problems, tmp_path):
    for key, prob in all_problems.items():
        path = tmp_path / f"{key}.json"
        save_problem(prob, str(path))
        back = load_problem(str(path))
        assert back.decision_names == prob.decision_names
        assert back.weight_mode == prob.weight_mode
        assert back.objectives == prob.objectives
        assert back.constraints == prob.constraints


def test_dict_round_trip(all_problems):
    for prob in all_problems.values():
        assert problem_from_dict(problem_to_dict(prob)) == prob


def test_schema_errors():
    with pytest.raises(ProblemFormatError):
        problem_from_dict({"decision_vars": ["x1"], "objectives": []})
    with pytest.raises(ProblemFormatError):
        problem_from_dict(
            {
                "decision_vars": ["x1"],
                "objectives": [
                    [{"coeff": 1.0, "monomial": {"zebra": 2}}],
                    [{"coeff": 1.0, "monomial": {"x1": 1}}],
                ],
            }
        )
    with pytest.raises(ProblemFormatError):
        problem_from_dict({"decision_vars": ["x1", "x1"], "objectives": []})
