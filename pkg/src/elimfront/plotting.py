"""SVG rendering of sampled fronts and eliminant zero curves (two objectives).

Plotting is a pure consumer of the CSV/JSON artifacts; nothing here feeds
back into the numerics.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .eliminate import EliminantSystem
from .front import ParetoPoint

GRID_POINTS = 400
BBOX_INFLATE = 0.2


def _bounding_box(samples: np.ndarray) -> tuple[float, float, float, float]:
    lo = samples.min(axis=0)
    hi = samples.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    lo = lo - BBOX_INFLATE * span
    hi = hi + BBOX_INFLATE * span
    return float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1])


def plot_front(
    points: Sequence[ParetoPoint],
    out_path,
    elim: EliminantSystem | None = None,
) -> None:
    """Scatter the sampled objective vectors; when an eliminant system over
    two objectives is supplied, overlay its zero-level curves traced on a
    400x400 grid over the sample bounding box inflated by 20%."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not points:
        raise ValueError("nothing to plot: no sampled points")
    samples = np.asarray([p.s for p in points], dtype=float)
    if samples.shape[1] != 2:
        raise ValueError("plotting supports exactly two objectives")

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if elim is not None:
        names = elim.objective_names
        if len(names) != 2:
            raise ValueError("eliminant system is not bivariate")
        x_lo, x_hi, y_lo, y_hi = _bounding_box(samples)
        xs = np.linspace(x_lo, x_hi, GRID_POINTS)
        ys = np.linspace(y_lo, y_hi, GRID_POINTS)
        grid_x, grid_y = np.meshgrid(xs, ys)
        for t in elim.polynomials:
            values = np.zeros_like(grid_x)
            for mono, coeff in t.terms.items():
                values += coeff * grid_x ** mono[0] * grid_y ** mono[1]
            ax.contour(grid_x, grid_y, values, levels=[0.0], colors="tab:blue")
        ax.set_xlabel(names[0])
        ax.set_ylabel(names[1])
    else:
        ax.set_xlabel("s1")
        ax.set_ylabel("s2")

    ax.scatter(samples[:, 0], samples[:, 1], s=14, c="black", zorder=3,
               label="sampled front")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)
