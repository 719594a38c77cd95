"""Geometry on the eliminant variety.

The gradient span of the eliminant system at a point is the normal space of
the front there, which is where scalarization weights live.  This module
recovers weights from that span, recovers decision variables by solving the
weight-substituted stationarity system with damped multi-start Newton, and
checks the supporting-hyperplane (tangency) property against feasible
samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.optimize

from .eliminate import EliminantSystem
from .polyring import Polynomial, VariableSpace
from .problem import MOProblem


class ZeroGradientError(RuntimeError):
    """The eliminant Jacobian vanishes at the requested point (a singular
    point of the variety); the normal space is undefined there."""


class NoConvergenceError(RuntimeError):
    """No Newton start converged; carries the best residual reached."""

    def __init__(self, best_residual: float):
        self.best_residual = best_residual
        super().__init__(f"no start converged (best residual {best_residual:.3e})")


@dataclass
class ParetoPoint:
    """One point of (or near) the Pareto front in objective space, with
    whatever has been recovered about it so far."""

    s: tuple[float, ...]
    w: tuple[float, ...] | None = None
    x: tuple[float, ...] | None = None
    lam: tuple[float, ...] | None = None
    residuals: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "s": list(self.s),
            "w": None if self.w is None else list(self.w),
            "x": None if self.x is None else list(self.x),
            "lambda": None if self.lam is None else list(self.lam),
            "residuals": dict(self.residuals),
        }


@dataclass(frozen=True)
class CriticalPoint:
    """Stationary point of the weight-substituted problem."""

    x: tuple[float, ...]
    lam: tuple[float, ...]
    kkt_residual: float
    weighted_value: float


# -- compiled evaluation ------------------------------------------------------


class _CompiledSystem:
    """Vectorized evaluator for a square-ish polynomial system and its
    Jacobian: all terms of all equations stacked into flat coefficient and
    exponent arrays so one evaluation is a handful of numpy ops."""

    def __init__(self, equations: Sequence[Polynomial], space: VariableSpace):
        self.n_eq = len(equations)
        self.n_var = len(space)
        rows, exps, coeffs = [], [], []
        for i, eq in enumerate(equations):
            for mono, c in eq.terms.items():
                rows.append(i)
                exps.append(mono)
                coeffs.append(c)
        self._rows = np.asarray(rows, dtype=int)
        self._exps = np.asarray(exps, dtype=float).reshape(len(rows), self.n_var)
        self._coeffs = np.asarray(coeffs, dtype=float)

        jr, jc, jexps, jcoeffs = [], [], [], []
        for i, eq in enumerate(equations):
            for j, name in enumerate(space.names):
                deriv = eq.differentiate(name)
                for mono, c in deriv.terms.items():
                    jr.append(i)
                    jc.append(j)
                    jexps.append(mono)
                    jcoeffs.append(c)
        self._jrows = np.asarray(jr, dtype=int)
        self._jcols = np.asarray(jc, dtype=int)
        self._jexps = np.asarray(jexps, dtype=float).reshape(len(jr), self.n_var)
        self._jcoeffs = np.asarray(jcoeffs, dtype=float)

    def value(self, z: np.ndarray) -> np.ndarray:
        mono = np.prod(z[None, :] ** self._exps, axis=1)
        out = np.zeros(self.n_eq)
        np.add.at(out, self._rows, self._coeffs * mono)
        return out

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        mono = np.prod(z[None, :] ** self._jexps, axis=1)
        out = np.zeros((self.n_eq, self.n_var))
        np.add.at(out, (self._jrows, self._jcols), self._jcoeffs * mono)
        return out


def _newton(
    compiled: _CompiledSystem,
    z0: np.ndarray,
    max_iter: int = 100,
    target: float = 1e-12,
) -> tuple[np.ndarray, float]:
    """Damped Newton (step halving, at most 30 halvings per step)."""
    z = np.array(z0, dtype=float)
    f = compiled.value(z)
    best = float(np.max(np.abs(f))) if f.size else 0.0
    for _ in range(max_iter):
        if best <= target:
            break
        jac = compiled.jacobian(z)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        if not np.all(np.isfinite(step)):
            break
        scale = 1.0
        improved = False
        for _ in range(30):
            trial = z + scale * step
            f_trial = compiled.value(trial)
            trial_norm = float(np.max(np.abs(f_trial)))
            if np.isfinite(trial_norm) and trial_norm < best:
                z, f, best = trial, f_trial, trial_norm
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
    return z, best


# -- weight recovery ----------------------------------------------------------


def eliminant_jacobian(elim: EliminantSystem, s: Sequence[float]) -> np.ndarray:
    """l' x m matrix whose row i is the gradient of t_i at s."""
    names = elim.objective_names
    point = dict(zip(names, s))
    rows = []
    for t in elim.polynomials:
        rows.append([t.differentiate(n).evaluate(point) for n in names])
    return np.asarray(rows, dtype=float)


def recover_weights(
    elim: EliminantSystem, s: Sequence[float], tol: float = 1e-8
) -> np.ndarray | None:
    """Weight vector in the normal space at s, or None when the normal
    space contains no nonnegative direction (the point lies on the variety
    but off the front).

    Single polynomial: the gradient, with the sign that makes it
    nonnegative.  Several polynomials: a linear program searching the
    gradient span for the vector maximizing the smallest component under a
    sum-to-one normalization.
    """
    jac = eliminant_jacobian(elim, s)
    if float(np.linalg.norm(jac)) <= tol:
        raise ZeroGradientError(
            f"eliminant Jacobian vanishes at {tuple(s)} (norm <= {tol})"
        )

    if len(elim.polynomials) == 1:
        grad = jac[0]
        for cand in (grad, -grad):
            floor = -tol * float(np.max(np.abs(cand)))
            if np.all(cand >= floor):
                return _normalize_weights(cand)
        return None

    # max tau s.t. w = J^T alpha, sum(w) = 1, w_i >= tau
    n_poly, m = jac.shape
    c = np.zeros(n_poly + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-jac.T, np.ones((m, 1))])
    b_ub = np.zeros(m)
    a_eq = np.hstack([jac.sum(axis=1), 0.0]).reshape(1, -1)
    b_eq = np.array([1.0])
    bounds = [(None, None)] * (n_poly + 1)
    res = scipy.optimize.linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs"
    )
    if not res.success:
        return None
    tau = -res.fun
    if tau < -tol:
        return None
    w = jac.T @ res.x[:-1]
    return _normalize_weights(w)


def _normalize_weights(w: np.ndarray) -> np.ndarray:
    w = np.where(w > 0.0, w, 0.0)
    total = w.sum()
    if total <= 0.0:
        raise ZeroGradientError("weight candidate collapsed to zero after clipping")
    return w / total


# -- decision recovery --------------------------------------------------------


def substituted_kkt(
    problem: MOProblem, w: Sequence[float]
) -> tuple[VariableSpace, tuple[Polynomial, ...]]:
    """Stationarity system for fixed weights: gradients of sum(w_i f_i) -
    sum(lam_k g_k) in the decision variables, plus the constraints.  Square
    in (x, lambda)."""
    w = [float(v) for v in w]
    if len(w) != problem.n_objectives:
        raise ValueError(f"expected {problem.n_objectives} weights, got {len(w)}")
    lam_names = tuple(f"lam{k + 1}" for k in range(problem.n_constraints))
    space = VariableSpace.from_groups(
        decision=problem.decision_names, multiplier=lam_names
    )
    lagr = Polynomial.zero(space)
    for w_i, f in zip(w, problem.objectives):
        lagr = lagr + w_i * f.embed(space)
    for name, g in zip(lam_names, problem.constraints):
        lagr = lagr - Polynomial.variable(space, name) * g.embed(space)
    equations = [lagr.differentiate(n) for n in problem.decision_names]
    equations.extend(g.embed(space) for g in problem.constraints)
    return space, tuple(equations)


def _seed_scale(problem: MOProblem) -> float:
    """Spread for the random Newton starts: solutions live roughly where
    the low-order terms balance the leading ones."""
    polys = (*problem.objectives, *problem.constraints)
    overall = max(p.max_abs_coeff() for p in polys)
    lead = 0.0
    for p in polys:
        d = p.degree
        top = max(
            (abs(c) for mono, c in p.terms.items() if sum(mono) == d), default=0.0
        )
        lead = max(lead, top)
    if lead <= 0.0 or overall <= 0.0:
        return 1.0
    deg = max(p.degree for p in polys)
    return float(np.clip((overall / lead) ** (1.0 / max(deg, 1)), 1.0, 1e3))


def _multiplier_seed(
    problem: MOProblem, w: Sequence[float], x: np.ndarray
) -> np.ndarray:
    """Least-squares multipliers making the stationarity residual small at x."""
    if not problem.constraints:
        return np.zeros(0)
    point = dict(zip(problem.decision_names, x))
    grad_f = np.array(
        [
            sum(
                w_i * f.differentiate(n).evaluate(point)
                for w_i, f in zip(w, problem.objectives)
            )
            for n in problem.decision_names
        ]
    )
    grad_g = np.column_stack(
        [
            [g.differentiate(n).evaluate(point) for n in problem.decision_names]
            for g in problem.constraints
        ]
    )
    lam, *_ = np.linalg.lstsq(grad_g, grad_f, rcond=None)
    return lam


def recover_decisions(
    problem: MOProblem,
    w: Sequence[float],
    seeds: Sequence[Sequence[float]] = (),
    tol: float = 1e-8,
    starts: int = 64,
    seed: int = 42,
) -> list[CriticalPoint]:
    """All distinct critical points of the weight-substituted problem found
    by damped Newton from the given seeds plus a random cloud.

    Results are deduplicated (1e-8 in the max norm) and sorted by weighted
    objective value, smallest first; the head of the list is the candidate
    minimizer.  Raises NoConvergenceError when nothing converges.
    """
    w = [float(v) for v in w]
    space, equations = substituted_kkt(problem, w)
    compiled = _CompiledSystem(equations, space)
    n_dec = len(problem.decision_names)

    rng = np.random.default_rng(seed)
    scale = _seed_scale(problem)
    starts_x = [np.asarray(s, dtype=float) for s in seeds]
    starts_x.extend(scale * rng.standard_normal(n_dec) for _ in range(starts))

    found: list[tuple[np.ndarray, float]] = []
    best_residual = np.inf
    for x0 in starts_x:
        if x0.shape != (n_dec,):
            raise ValueError(f"seed has shape {x0.shape}, expected ({n_dec},)")
        z0 = np.concatenate([x0, _multiplier_seed(problem, w, x0)])
        z, res = _newton(compiled, z0)
        best_residual = min(best_residual, res)
        if res <= tol and np.all(np.isfinite(z)):
            found.append((z, res))
    if not found:
        raise NoConvergenceError(best_residual)

    # Deterministic merge: sort, then drop near-duplicates.
    found.sort(key=lambda zr: tuple(zr[0]))
    unique: list[tuple[np.ndarray, float]] = []
    for z, res in found:
        if any(np.max(np.abs(z - u)) <= 1e-8 for u, _ in unique):
            continue
        unique.append((z, res))

    out = []
    for z, res in unique:
        x = z[:n_dec]
        point = dict(zip(problem.decision_names, x))
        value = sum(
            w_i * f.evaluate(point) for w_i, f in zip(w, problem.objectives)
        )
        out.append(
            CriticalPoint(
                x=tuple(float(v) for v in x),
                lam=tuple(float(v) for v in z[n_dec:]),
                kkt_residual=float(res),
                weighted_value=float(value),
            )
        )
    out.sort(key=lambda cp: cp.weighted_value)
    return out


# -- certificates and projections ---------------------------------------------


@dataclass(frozen=True)
class TangencyReport:
    passed: bool
    margin: float


def tangency_certificate(
    s: Sequence[float],
    w: Sequence[float],
    feasible_samples: Sequence[Sequence[float]],
    tol: float = 1e-8,
) -> TangencyReport:
    """Supporting-hyperplane check: every feasible objective sample s' must
    satisfy w.s' >= w.s - tol.  Returns the minimum margin min(w.s' - w.s)."""
    w = np.asarray(w, dtype=float)
    base = float(w @ np.asarray(s, dtype=float))
    samples = np.asarray(feasible_samples, dtype=float)
    margin = float(np.min(samples @ w) - base)
    return TangencyReport(passed=margin >= -tol, margin=margin)


def newton_project(
    elim: EliminantSystem,
    s0: Sequence[float],
    max_iter: int = 60,
    target: float = 1e-12,
) -> tuple[np.ndarray, float]:
    """Gauss-Newton projection of s0 onto the eliminant zero set.

    Returns (point, residual); the residual is the max absolute eliminant
    value at the returned point.
    """
    space = elim.polynomials[0].space
    compiled = _CompiledSystem(elim.polynomials, space)
    s = np.asarray(s0, dtype=float)
    res = float(np.max(np.abs(compiled.value(s))))
    for _ in range(max_iter):
        if res <= target:
            break
        jac = compiled.jacobian(s)
        step, *_ = np.linalg.lstsq(jac, -compiled.value(s), rcond=None)
        if not np.all(np.isfinite(step)):
            break
        scale = 1.0
        improved = False
        for _ in range(30):
            trial = s + scale * step
            trial_res = float(np.max(np.abs(compiled.value(trial))))
            if trial_res < res:
                s, res = trial, trial_res
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
    return s, res
