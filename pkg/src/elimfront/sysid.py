"""Misfit-versus-latency model fitting as a stationarity system.

For an autonomous linear time-invariant model a(q) yhat = e, fitting measured
output y trades off the misfit ||y - yhat||^2 against the latency ||e||^2.
This module generates the corresponding stationarity system over the model
coefficients, smoothed output, latent input, multipliers, and the convex
weight alpha, so that elimination yields an implicit description of the
misfit/latency Pareto front.  Independent brute-force oracles for the two
axis intercepts of that front are provided for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .eliminate import EliminantSystem
from .polyring import Polynomial, VariableSpace
from .problem import MOProblem, PFSystem


@dataclass(frozen=True)
class MisfitLatencyProblem:
    """Fit an order-``n_a`` autonomous model to measured output ``y``.

    The model polynomial a(q) has n_a+1 coefficients with the trailing one
    fixed to 1 (monic), leaving n_a free.  Requires N >= n_a + 2 so the
    Hankel matrix has at least two rows.
    """

    y: tuple[float, ...]
    n_a: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if self.n_a < 1:
            raise ValueError("model order n_a must be at least 1")
        if len(self.y) < self.n_a + 2:
            raise ValueError(
                f"need at least n_a + 2 = {self.n_a + 2} samples, got {len(self.y)}"
            )

    @property
    def n_samples(self) -> int:
        return len(self.y)

    @property
    def hankel_shape(self) -> tuple[int, int]:
        return (self.n_samples - self.n_a, self.n_a + 1)

    @property
    def toeplitz_shape(self) -> tuple[int, int]:
        return (self.n_samples - self.n_a, self.n_samples)


def build_hankel(yhat_vars: Sequence[Polynomial], n_a: int) -> list[list[Polynomial]]:
    """(N-n_a) x (n_a+1) Hankel matrix of symbolic output entries:
    H[i][j] = yhat[i+j]."""
    n = len(yhat_vars)
    if n < n_a + 2:
        raise ValueError(f"need at least n_a + 2 = {n_a + 2} entries, got {n}")
    return [
        [yhat_vars[i + j] for j in range(n_a + 1)] for i in range(n - n_a)
    ]


def build_toeplitz(a_coeffs: Sequence[Polynomial], n_cols: int) -> list[list[Polynomial]]:
    """(n_cols - n_a) x n_cols banded Toeplitz with the model coefficients on
    the band: T[i][i+j] = a[j], zero elsewhere."""
    n_a = len(a_coeffs) - 1
    if n_cols < n_a + 2:
        raise ValueError(f"need at least n_a + 2 = {n_a + 2} columns, got {n_cols}")
    space = a_coeffs[0].space
    zero = Polynomial.zero(space)
    rows = []
    for i in range(n_cols - n_a):
        row = [zero] * n_cols
        for j, a_j in enumerate(a_coeffs):
            row[i + j] = a_j
        rows.append(row)
    return rows


def _variable_space(prob: MisfitLatencyProblem) -> VariableSpace:
    n, n_a = prob.n_samples, prob.n_a
    return VariableSpace.from_groups(
        decision=(
            *(f"a{i + 1}" for i in range(n_a)),
            *(f"yhat{k + 1}" for k in range(n)),
            *(f"e{i + 1}" for i in range(n - n_a)),
        ),
        weight=("alpha",),
        multiplier=tuple(f"lam{i + 1}" for i in range(n - n_a)),
        objective=("s1", "s2"),
    )


def misfit_latency_moproblem(prob: MisfitLatencyProblem) -> MOProblem:
    """The same trade-off posed as a plain constrained bi-objective problem:
    minimize (||y - yhat||^2, ||e||^2) subject to H(yhat) a = e.

    Decision variables are the free model coefficients, the smoothed output,
    and the latent input; this is the form the sampling oracle solves.
    """
    n, n_a = prob.n_samples, prob.n_a
    space = VariableSpace.from_groups(
        decision=(
            *(f"a{i + 1}" for i in range(n_a)),
            *(f"yhat{k + 1}" for k in range(n)),
            *(f"e{i + 1}" for i in range(n - n_a)),
        )
    )
    a = [Polynomial.variable(space, f"a{i + 1}") for i in range(n_a)]
    a.append(Polynomial.constant(space, 1.0))
    yhat = [Polynomial.variable(space, f"yhat{k + 1}") for k in range(n)]
    e = [Polynomial.variable(space, f"e{i + 1}") for i in range(n - n_a)]

    misfit = Polynomial.zero(space)
    for y_k, yh_k in zip(prob.y, yhat):
        diff = yh_k - Polynomial.constant(space, y_k)
        misfit = misfit + diff * diff
    latency = Polynomial.zero(space)
    for e_i in e:
        latency = latency + e_i * e_i

    hankel = build_hankel(yhat, n_a)
    constraints = []
    for i in range(n - n_a):
        row = Polynomial.zero(space)
        for j in range(n_a + 1):
            row = row + hankel[i][j] * a[j]
        constraints.append(row - e[i])
    return MOProblem(space, (misfit, latency), tuple(constraints))


def build_misfit_latency_pf(y: Sequence[float], n_a: int) -> PFSystem:
    """Stationarity system of the weighted problem
    min 1/2 (alpha ||y - yhat||^2 + (1 - alpha) ||e||^2) s.t. H(yhat) a = e,
    supplemented with s1 = ||y - yhat||^2 and s2 = ||e||^2.

    Equation blocks, in order: gradient in the free model coefficients
    (-H'^T lam, n_a rows, H' = Hankel without its last column); gradient in
    the smoothed output (alpha (yhat - y) - T_a^T lam, N rows); gradient in
    the latent input ((1 - alpha) e + lam, N - n_a rows); the model
    constraint (H a - e, N - n_a rows); the two objective relations.
    """
    prob = MisfitLatencyProblem(tuple(y), n_a)
    n = prob.n_samples
    space = _variable_space(prob)

    a = [Polynomial.variable(space, f"a{i + 1}") for i in range(n_a)]
    a.append(Polynomial.constant(space, 1.0))
    yhat = [Polynomial.variable(space, f"yhat{k + 1}") for k in range(n)]
    e = [Polynomial.variable(space, f"e{i + 1}") for i in range(n - n_a)]
    lam = [Polynomial.variable(space, f"lam{i + 1}") for i in range(n - n_a)]
    alpha = Polynomial.variable(space, "alpha")
    one = Polynomial.constant(space, 1.0)

    hankel = build_hankel(yhat, n_a)
    toeplitz = build_toeplitz(a, n)

    equations: list[Polynomial] = []
    for j in range(n_a):
        grad = Polynomial.zero(space)
        for i in range(n - n_a):
            grad = grad - hankel[i][j] * lam[i]
        equations.append(grad)
    for k in range(n):
        grad = alpha * (yhat[k] - Polynomial.constant(space, prob.y[k]))
        for i in range(n - n_a):
            grad = grad - toeplitz[i][k] * lam[i]
        equations.append(grad)
    for i in range(n - n_a):
        equations.append((one - alpha) * e[i] + lam[i])
    for i in range(n - n_a):
        row = Polynomial.zero(space)
        for j in range(n_a + 1):
            row = row + hankel[i][j] * a[j]
        equations.append(row - e[i])

    s1 = Polynomial.variable(space, "s1")
    s2 = Polynomial.variable(space, "s2")
    misfit = Polynomial.zero(space)
    for y_k, yh_k in zip(prob.y, yhat):
        diff = yh_k - Polynomial.constant(space, y_k)
        misfit = misfit + diff * diff
    latency = Polynomial.zero(space)
    for e_i in e:
        latency = latency + e_i * e_i
    equations.append(s1 - misfit)
    equations.append(s2 - latency)

    eliminated = (
        *space.decision_names,
        *space.weight_names,
        *space.multiplier_names,
    )
    diagnostics = {
        "n_samples": n,
        "model_order": n_a,
        # The block construction yields 3N - n_a + 2 equations; merging the
        # n_a model-coefficient gradient rows into the rest would give the
        # more compact count 3N - 2 n_a + 2.  Both are recorded.
        "n_equations": len(equations),
        "n_equations_compact": 3 * n - 2 * n_a + 2,
        "n_variables": len(space),
        "equation_degrees": tuple(eq.degree for eq in equations),
        # The misfit/latency front is a curve in the (s1, s2)-plane: one
        # relation suffices.
        "target_intersection_dim": 1,
    }
    return PFSystem(
        space=space,
        equations=tuple(equations),
        eliminated_names=eliminated,
        kept_names=("s1", "s2"),
        diagnostics=diagnostics,
    )


def _measured_hankel(y: Sequence[float], n_a: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    n = y.size
    return np.column_stack([y[j : n - n_a + j] for j in range(n_a + 1)])


def _ar_fit(y: Sequence[float], n_a: int) -> np.ndarray:
    """Least-squares monic AR coefficients on the measured-data Hankel."""
    h = _measured_hankel(y, n_a)
    free, *_ = np.linalg.lstsq(h[:, :n_a], -h[:, n_a], rcond=None)
    return np.append(free, 1.0)


def ar_latency_norm(y: Sequence[float], n_a: int) -> float:
    """Latency of the best pure autoregressive model: min over monic a of
    ||H(y) a||^2 with the Hankel built from the measured data (no misfit).

    This is the s2-axis intercept of the misfit/latency front.
    """
    h = _measured_hankel(y, n_a)
    r = h @ _ar_fit(y, n_a)
    return float(r @ r)


def _projection_misfit(y: np.ndarray, a_full: np.ndarray) -> float:
    """||y - yhat||^2 for the closest yhat satisfying T_a yhat = 0 exactly."""
    n = y.size
    n_a = a_full.size - 1
    t = np.zeros((n - n_a, n))
    for i in range(n - n_a):
        t[i, i : i + n_a + 1] = a_full
    ty = t @ y
    return float(ty @ np.linalg.solve(t @ t.T, ty))


def autonomous_misfit_norm(
    y: Sequence[float], n_a: int, span: float = 3.0, samples_per_axis: int = 601
) -> float:
    """Misfit of the best exact autonomous model: min over monic a of
    ||y - yhat||^2 subject to H(yhat) a = 0 (zero latency).

    The inner problem is linear in yhat (an orthogonal projection); the
    outer minimization runs a dense grid over the free coefficients in
    [-span, span] followed by a Newton refinement on finite differences.
    This is the s1-axis intercept of the misfit/latency front.
    """
    y = np.asarray(y, dtype=float)
    axes = [np.linspace(-span, span, samples_per_axis)] * n_a
    best_val = math.inf
    best = None
    for point in np.stack(np.meshgrid(*axes), axis=-1).reshape(-1, n_a):
        val = _projection_misfit(y, np.append(point, 1.0))
        if val < best_val:
            best_val, best = val, point

    # Newton polish on the grid winner.
    def phi(free: np.ndarray) -> float:
        return _projection_misfit(y, np.append(free, 1.0))

    x = np.array(best, dtype=float)
    h = 1e-5
    for _ in range(60):
        grad = np.zeros(n_a)
        hess = np.zeros((n_a, n_a))
        for i in range(n_a):
            e_i = np.zeros(n_a)
            e_i[i] = h
            grad[i] = (phi(x + e_i) - phi(x - e_i)) / (2 * h)
            hess[i, i] = (phi(x + e_i) - 2 * phi(x) + phi(x - e_i)) / h**2
            for j in range(i + 1, n_a):
                e_j = np.zeros(n_a)
                e_j[j] = h
                hess[i, j] = hess[j, i] = (
                    phi(x + e_i + e_j)
                    - phi(x + e_i - e_j)
                    - phi(x - e_i + e_j)
                    + phi(x - e_i - e_j)
                ) / (4 * h**2)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        # Damped: halve until improvement.
        scale = 1.0
        for _ in range(30):
            candidate = x - scale * step
            if phi(candidate) <= phi(x):
                break
            scale *= 0.5
        x = x - scale * step
        if np.linalg.norm(scale * step) < 1e-12:
            break
    return min(best_val, phi(x))


def latency_misfit_scalarized(
    y: Sequence[float],
    n_a: int,
    alpha: float,
    starts: int = 64,
    seed: int = 42,
) -> tuple[float, float, np.ndarray, np.ndarray, np.ndarray]:
    """Solve the fixed-weight trade-off min alpha*||y-yhat||^2 +
    (1-alpha)*||e||^2 s.t. H(yhat) a = e and return
    (misfit, latency, a, yhat, e) at the global minimizer.

    Newton multi-start on the stationarity system, warm-started from the
    two closed-form regime endpoints (pure AR fit and exact-model
    projection) in addition to the random cloud.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    from .oracle import weighted_sum_solve

    prob = MisfitLatencyProblem(tuple(y), n_a)
    mo = misfit_latency_moproblem(prob)
    y_arr = np.asarray(prob.y, dtype=float)

    a_fit = _ar_fit(prob.y, n_a)
    e_fit = _measured_hankel(prob.y, n_a) @ a_fit
    seed_ar = np.concatenate([a_fit[:n_a], y_arr, e_fit])

    n = prob.n_samples
    t = np.zeros((n - n_a, n))
    for i in range(n - n_a):
        t[i, i : i + n_a + 1] = a_fit
    yhat_proj = y_arr - t.T @ np.linalg.solve(t @ t.T, t @ y_arr)
    seed_proj = np.concatenate([a_fit[:n_a], yhat_proj, np.zeros(n - n_a)])

    point = weighted_sum_solve(
        mo,
        (alpha, 1.0 - alpha),
        starts=starts,
        seed=seed,
        extra_seeds=(seed_ar, seed_proj),
    )
    x = np.asarray(point.x, dtype=float)
    a = np.append(x[:n_a], 1.0)
    yhat = x[n_a : n_a + n]
    e = x[n_a + n :]
    return point.s[0], point.s[1], a, yhat, e


def axis_intercepts(
    elim: EliminantSystem,
    zero_var: str = "s1",
    solve_var: str = "s2",
    tol: float = 1e-8,
) -> tuple[float, ...]:
    """Nonnegative real points where the eliminant zero set meets the
    ``solve_var`` axis (all other objective variables at zero), sorted."""
    first, rest = elim.polynomials[0], elim.polynomials[1:]
    others = [n for n in elim.objective_names if n != solve_var]
    assignment = {n: 0.0 for n in others}
    if zero_var not in others:
        raise ValueError(f"{zero_var!r} is not another objective variable")

    restricted = first.substitute(assignment)
    idx = restricted.space.index(solve_var)
    deg = restricted.degree
    if deg < 1:
        raise ValueError("eliminant is constant on the axis")
    coeffs = np.zeros(deg + 1)
    for mono, c in restricted.terms.items():
        coeffs[deg - mono[idx]] += c
    roots = np.roots(coeffs)

    out = []
    for r in roots:
        if abs(r.imag) > 1e-8 * (1.0 + abs(r.real)) or r.real < -tol:
            continue
        val = max(0.0, float(r.real))
        point = dict(assignment)
        point[solve_var] = val
        if all(abs(t.evaluate(point)) <= math.sqrt(tol) * (1.0 + val) for t in rest):
            out.append(val)
    # Merge near-duplicates from conjugate pairs collapsing onto the axis.
    out.sort()
    merged: list[float] = []
    for v in out:
        if not merged or v - merged[-1] > 1e-9 * (1.0 + v):
            merged.append(v)
    return tuple(merged)
