"""Independent scalarization route to the Pareto front.

Everything here reaches the front without touching the elimination
machinery: fix a strictly positive weight vector, minimize the weighted sum
of objectives subject to the constraints, and record the objective vector.
Sweeping a simplex grid of weights gives a point cloud the implicit
description can be validated against.
"""

from __future__ import annotations

import itertools
import logging
from typing import Iterable, Sequence

import numpy as np

from .eliminate import EliminantSystem
from .front import NoConvergenceError, ParetoPoint, recover_decisions
from .problem import MOProblem

log = logging.getLogger(__name__)

INTERIOR_EPS = 1e-4
WEIGHT_SUM_TOL = 1e-9


def weighted_sum_solve(
    problem: MOProblem,
    w: Sequence[float],
    starts: int = 64,
    seed: int = 42,
    tol: float = 1e-8,
    extra_seeds: Sequence[Sequence[float]] = (),
) -> ParetoPoint:
    """Minimize sum(w_i f_i) subject to the constraints and report the
    objective vector reached.

    Weights must be strictly positive and sum to one.  All converged
    stationary points are compared and the smallest weighted value wins, so
    saddle points and maximizers of the scalarized problem are discarded.
    """
    w = tuple(float(v) for v in w)
    if len(w) != problem.n_objectives:
        raise ValueError(f"expected {problem.n_objectives} weights, got {len(w)}")
    if any(v <= 0.0 for v in w):
        raise ValueError("weights must be strictly positive")
    if abs(sum(w) - 1.0) > WEIGHT_SUM_TOL:
        raise ValueError(f"weights must sum to 1, got {sum(w)!r}")

    candidates = recover_decisions(
        problem, w, seeds=extra_seeds, tol=tol, starts=starts, seed=seed
    )
    best = candidates[0]  # sorted by weighted value
    point = dict(zip(problem.decision_names, best.x))
    s = tuple(float(v) for v in problem.objective_values(point))
    constraint_res = problem.constraint_residuals(point)
    return ParetoPoint(
        s=s,
        w=w,
        x=best.x,
        lam=best.lam,
        residuals={
            "kkt": best.kkt_residual,
            "constraint": max((abs(r) for r in constraint_res), default=0.0),
        },
    )


def simplex_grid(m: int, resolution: int) -> list[tuple[float, ...]]:
    """Strictly interior weight grid: all length-m positive integer
    compositions of `resolution`, divided by `resolution`.  When the
    resolution is too small to admit any (resolution < m), the barycenter
    is returned so the grid is never empty.  Components are clamped away
    from the boundary by INTERIOR_EPS and renormalized."""
    if m < 1:
        raise ValueError("need at least one objective")
    if resolution < m:
        return [tuple([1.0 / m] * m)]
    grid = []
    # Compositions: place m-1 cut points in the interior of [0, resolution].
    for cuts in itertools.combinations(range(1, resolution), m - 1):
        parts = np.diff((0, *cuts, resolution)).astype(float)
        w = np.clip(parts / resolution, INTERIOR_EPS, None)
        w = w / w.sum()
        grid.append(tuple(float(v) for v in w))
    return grid


def _nondominated_indices(vectors: Sequence[Sequence[float]]) -> list[int]:
    arr = np.asarray(vectors, dtype=float)
    keep = []
    for i in range(arr.shape[0]):
        dominated = False
        for j in range(arr.shape[0]):
            if j == i:
                continue
            if np.all(arr[j] <= arr[i]) and np.any(arr[j] < arr[i]):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    return keep


def dominance_filter(points: Sequence[Sequence[float]]) -> list:
    """Sub-list of points not strictly dominated by any other point.

    A point p is dominated by q when q <= p componentwise with at least one
    strict inequality.  Comparisons are exact; exact duplicates do not
    dominate each other, so both survive.
    """
    return [points[i] for i in _nondominated_indices(points)]


def sample_front(
    problem: MOProblem,
    grid_resolution: int = 21,
    starts: int = 64,
    seed: int = 42,
    tol: float = 1e-8,
) -> list[ParetoPoint]:
    """Scalarization sweep over the interior weight grid.

    Grid points whose scalarized problem defeats the Newton multi-start are
    skipped (and counted in the log); dominated points are filtered out
    afterwards since a weighted-sum stationary point need not be globally
    optimal.  Output is in weight-lexicographic order.
    """
    grid = sorted(simplex_grid(problem.n_objectives, grid_resolution))
    points: list[ParetoPoint] = []
    skipped = 0
    for i, w in enumerate(grid):
        try:
            points.append(
                weighted_sum_solve(
                    problem, w, starts=starts, seed=seed + i, tol=tol
                )
            )
        except NoConvergenceError as exc:
            skipped += 1
            log.info("grid weight %s skipped: %s", w, exc)
    if skipped:
        log.info("%d of %d grid points skipped", skipped, len(grid))
    if not points:
        return []
    keep = _nondominated_indices([p.s for p in points])
    return [points[i] for i in keep]


def annotate_eliminant_residuals(
    points: Iterable[ParetoPoint], elim: EliminantSystem
) -> None:
    """Attach max |t_i(s)| to each point's residual record, in place."""
    for p in points:
        res = elim.residuals(p.s)
        p.residuals["eliminant"] = max(res) if res else 0.0


def max_eliminant_residual(
    points: Sequence[ParetoPoint], elim: EliminantSystem
) -> float:
    values = []
    for p in points:
        res = elim.residuals(p.s)
        values.append(max(res) if res else 0.0)
    return max(values) if values else 0.0


def write_front_csv(points: Sequence[ParetoPoint], path) -> None:
    """One row per point: s1..sm, w1..wm, kkt_residual, eliminant_residual,
    full double precision (17 significant digits)."""
    if not points:
        raise ValueError("no points to write")
    m = len(points[0].s)
    header = (
        [f"s{i + 1}" for i in range(m)]
        + [f"w{i + 1}" for i in range(m)]
        + ["kkt_residual", "eliminant_residual"]
    )
    lines = [",".join(header)]
    for p in points:
        if p.w is None or len(p.w) != m:
            raise ValueError("every point needs a weight vector for CSV export")
        row = list(p.s) + list(p.w) + [
            p.residuals.get("kkt", float("nan")),
            p.residuals.get("eliminant", float("nan")),
        ]
        lines.append(",".join(format(v, ".17g") for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_front_csv(path) -> list[ParetoPoint]:
    """Inverse of write_front_csv."""
    with open(path) as fh:
        rows = [line.strip() for line in fh if line.strip()]
    if not rows:
        raise ValueError(f"{path}: empty front file")
    header = rows[0].split(",")
    m = sum(1 for name in header if name.startswith("s") and name[1:].isdigit())
    points = []
    for row in rows[1:]:
        vals = [float(v) for v in row.split(",")]
        points.append(
            ParetoPoint(
                s=tuple(vals[:m]),
                w=tuple(vals[m : 2 * m]),
                residuals={"kkt": vals[2 * m], "eliminant": vals[2 * m + 1]},
            )
        )
    return points
