"""Shared fixtures: each benchmark problem is eliminated once per session
(the 3234x3003 case dominates the runtime) and the timing is kept so the
acceptance tests can check the budget without recomputing."""

import time
from typing import NamedTuple

import pytest

from elimfront import fixtures
from elimfront.eliminate import EliminantSystem, eliminate_system
from elimfront.macaulay import MacaulayMatrix
from elimfront.oracle import annotate_eliminant_residuals, sample_front
from elimfront.problem import MOProblem, PFSystem, build_pf_system


class Case(NamedTuple):
    problem: MOProblem
    system: PFSystem
    elim: EliminantSystem
    matrix: MacaulayMatrix
    elapsed: float


def _eliminated(problem: MOProblem) -> Case:
    system = build_pf_system(problem)
    t0 = time.perf_counter()
    elim, matrix = eliminate_system(system)
    elapsed = time.perf_counter() - t0
    return Case(problem, system, elim, matrix, elapsed)


@pytest.fixture(scope="session")
def ex1_case() -> Case:
    return _eliminated(fixtures.paraboloid_with_planes())


@pytest.fixture(scope="session")
def ex2_case() -> Case:
    return _eliminated(fixtures.cubics_on_circle())


@pytest.fixture(scope="session")
def ex3_case() -> Case:
    return _eliminated(fixtures.three_shifted_squares())


@pytest.fixture(scope="session")
def portfolio_case() -> Case:
    return _eliminated(fixtures.portfolio())


def _front(case: Case, resolution: int):
    points = sample_front(case.problem, grid_resolution=resolution)
    annotate_eliminant_residuals(points, case.elim)
    return points


@pytest.fixture(scope="session")
def ex1_front(ex1_case):
    return _front(ex1_case, 8)


@pytest.fixture(scope="session")
def ex2_front(ex2_case):
    return _front(ex2_case, 21)


@pytest.fixture(scope="session")
def ex3_front(ex3_case):
    return _front(ex3_case, 8)


@pytest.fixture(scope="session")
def portfolio_front(portfolio_case):
    return _front(portfolio_case, 21)
