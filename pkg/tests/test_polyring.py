"""Polynomial layer: ordering, arithmetic identities, calculus."""

import itertools
import math

import numpy as np
import pytest

from elimfront.polyring import (
    Monomial,
    Polynomial,
    VariableSpace,
    count_monomials_up_to,
    monomial_degree,
    monomials_up_to,
)


def _space(n_decision: int, n_objective: int = 0) -> VariableSpace:
    return VariableSpace.from_groups(
        decision=tuple(f"x{i+1}" for i in range(n_decision)),
        objective=tuple(f"s{i+1}" for i in range(n_objective)),
    )


def _random_poly(rng, space, degree, n_terms):
    monos = monomials_up_to(space, degree)
    picks = rng.choice(len(monos), size=min(n_terms, len(monos)), replace=False)
    return Polynomial(space, {monos[i]: float(rng.standard_normal()) for i in picks})


# -- monomial enumeration ------------------------------------------------


def brute_force_count(nvars: int, d: int) -> int:
    """Count exponent vectors with total degree <= d by direct enumeration."""
    return sum(
        1
        for exps in itertools.product(range(d + 1), repeat=nvars)
        if sum(exps) <= d
    )


@pytest.mark.parametrize("nvars", range(1, 9))
@pytest.mark.parametrize("d", range(0, 9))
def test_monomial_count_formula(nvars, d):
    space = _space(nvars)
    monos = monomials_up_to(space, d)
    expected = brute_force_count(nvars, d)
    assert len(monos) == expected
    assert count_monomials_up_to(nvars, d) == expected
    assert expected == math.comb(nvars + d, d)


def test_order_is_total_and_graded():
    space = _space(3, 2)
    monos = monomials_up_to(space, 4)
    assert len(set(monos)) == len(monos), "ordering has ties"
    degrees = [monomial_degree(m) for m in monos]
    assert degrees == sorted(degrees)
    # within a degree block the order is a strict lexicographic comparison
    for a, b in zip(monos, monos[1:]):
        if monomial_degree(a) == monomial_degree(b):
            assert a != b


def test_order_is_deterministic():
    space = _space(4, 1)
    assert monomials_up_to(space, 5) == monomials_up_to(space, 5)


# -- arithmetic ----------------------------------------------------------


def test_product_rule():
    rng = np.random.default_rng(7)
    space = _space(3)
    for _ in range(20):
        p = _random_poly(rng, space, 3, 4)
        q = _random_poly(rng, space, 3, 4)
        for name in space.names:
            lhs = (p * q).differentiate(name)
            rhs = p.differentiate(name) * q + p * q.differentiate(name)
            diff = lhs - rhs
            assert diff.max_abs_coeff() <= 1e-12 * max(
                1.0, lhs.max_abs_coeff()
            ), f"product rule fails for {name}"


def _random_int_poly(rng, space, degree, n_terms):
    monos = monomials_up_to(space, degree)
    picks = rng.choice(len(monos), size=min(n_terms, len(monos)), replace=False)
    coeffs = rng.integers(-4, 5, size=len(picks))
    return Polynomial(
        space, {monos[i]: float(c) for i, c in zip(picks, coeffs) if c != 0}
    )


def test_multiply_commutative_associative():
    # small-integer coefficients keep every product and sum exactly
    # representable, so the identities hold as term-map equality
    rng = np.random.default_rng(11)
    space = _space(2, 1)
    for _ in range(10):
        p = _random_int_poly(rng, space, 2, 4)
        q = _random_int_poly(rng, space, 2, 4)
        r = _random_int_poly(rng, space, 1, 3)
        assert (p * q).terms == (q * p).terms
        assert ((p * q) * r).terms == (p * (q * r)).terms


def test_multiply_commutative_float_coefficients():
    rng = np.random.default_rng(13)
    space = _space(3)
    for _ in range(10):
        p = _random_poly(rng, space, 3, 5)
        q = _random_poly(rng, space, 3, 5)
        assert (p * q).terms == (q * p).terms


def test_no_stored_zero_coefficients():
    space = _space(2)
    x1 = Polynomial.variable(space, "x1")
    diff = (x1 + 1.0) - (x1 + 1.0)
    assert diff.is_zero()
    assert diff.terms == {}
    assert diff.degree == -1


def test_scalar_mixing():
    space = _space(1)
    x = Polynomial.variable(space, "x1")
    p = 1 + 2 * x - 3.0
    assert p.evaluate({"x1": 2.0}) == 2.0
    total = sum([x, x * x, 4 * x])
    assert total.evaluate({"x1": 3.0}) == 3 + 9 + 12
    q = 5 - x
    assert q.evaluate({"x1": 1.0}) == 4.0


def test_evaluate_requires_assignments():
    space = _space(2)
    p = Polynomial.variable(space, "x1") * Polynomial.variable(space, "x2")
    with pytest.raises(ValueError, match="missing"):
        p.evaluate({"x1": 1.0})
    # variables outside the support need no value
    assert Polynomial.variable(space, "x1").evaluate({"x1": 2.0}) == 2.0


# -- calculus vs finite differences ---------------------------------------


def test_derivative_matches_finite_difference():
    rng = np.random.default_rng(23)
    space = _space(3)
    h = 1e-6
    for _ in range(15):
        p = _random_poly(rng, space, 4, 6)
        z = {n: float(rng.uniform(-1.5, 1.5)) for n in space.names}
        for name in space.names:
            sym = p.differentiate(name).evaluate(z)
            up = dict(z, **{name: z[name] + h})
            dn = dict(z, **{name: z[name] - h})
            fd = (p.evaluate(up) - p.evaluate(dn)) / (2 * h)
            assert sym == pytest.approx(fd, rel=1e-6, abs=1e-6)


# -- reference evaluations -------------------------------------------------


def _surface_poly():
    """5*s2^2 - 6*s2*s3 + 2*s3^2 - s1 - 8*s2 + 2*s3 + 13 over (s1, s2, s3)."""
    space = VariableSpace.from_groups(objective=("s1", "s2", "s3"))
    s1, s2, s3 = (Polynomial.variable(space, n) for n in ("s1", "s2", "s3"))
    return 5 * s2 * s2 - 6 * s2 * s3 + 2 * s3 * s3 - s1 - 8 * s2 + 2 * s3 + 13


def test_surface_polynomial_roots():
    t = _surface_poly()
    # objective values of the decision point (3, 2): 125-210+98-40+14+13 = 0
    assert t.evaluate({"s1": 0.0, "s2": 5.0, "s3": 7.0}) == 0.0
    # objective values of the decision point (0, 0)
    assert t.evaluate({"s1": 13.0, "s2": 0.0, "s3": 0.0}) == 0.0


def test_sextic_curve_root():
    space = VariableSpace.from_groups(objective=("s1", "s2"))
    s1, s2 = Polynomial.variable(space, "s1"), Polynomial.variable(space, "s2")
    t = (
        s2**6 - 12 * s2**5 - 12 * s1 * s2**4 + 16 * s1**4
        + 48 * s1**3 * s2 + 48 * s1**2 * s2**2 + 32 * s1 * s2**3
        + 48 * s2**4 - 32 * s1**3 - 48 * s1**2 * s2
    )
    # objective values of the feasible point (0, -2) on the circle constraint
    assert t.evaluate({"s1": 8.0, "s2": -4.0}) == 0.0
