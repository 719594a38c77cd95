"""Command-line front end.

Subcommands cover the full pipeline: build the stationarity system from a
problem file, run the degree search and extraction, sample the front with
the scalarization oracle, verify an eliminant against samples, recover
weights/decisions at a point, generate the misfit-latency system from data,
and render plots.

Exit codes: 0 success, 1 usage, 2 numerical failure, 3 I/O or schema.
Errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .eliminate import (
    DEFAULT_DEGREE_CAP,
    DEFAULT_RANK_TOL,
    DegreeCapExceeded,
    EmptyEliminantError,
    FactorizationError,
    eliminate_system,
    load_eliminant,
    save_eliminant,
)
from .front import (
    NoConvergenceError,
    ZeroGradientError,
    newton_project,
    recover_decisions,
    recover_weights,
)
from .oracle import (
    annotate_eliminant_residuals,
    max_eliminant_residual,
    read_front_csv,
    sample_front,
    write_front_csv,
)
from .problem import MOProblem, ProblemFormatError, build_pf_system
from .problem import load_problem as _load_problem_file
from .sysid import build_misfit_latency_pf

DEFAULT_GRID = 21
DEFAULT_STARTS = 64
DEFAULT_SEED = 42
DEFAULT_POINT_TOL = 1e-8


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise _UsageError(message)


def load_problem(path) -> MOProblem:
    """Parse and validate a problem file; front-end entry requires at
    least two objectives (a single objective has no front to trade off)."""
    problem = _load_problem_file(path)
    if problem.n_objectives < 2:
        raise ProblemFormatError(
            f"{path}: need at least 2 objectives, found {problem.n_objectives}"
        )
    return problem


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise _UsageError(f"expected comma-separated numbers, got {text!r}")


def _flag_record(args, names) -> dict:
    return {name: getattr(args, name) for name in names}


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _add_eliminate_flags(sub) -> None:
    sub.add_argument("--degree-max", type=int, default=DEFAULT_DEGREE_CAP)
    sub.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL)
    sub.add_argument(
        "--row-scaling",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="unit 2-norm row scaling of the Macaulay matrix (default on)",
    )
    sub.add_argument(
        "--variable-scaling",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="power-of-two rebalancing of the eliminated variables (default on)",
    )


def _add_sampling_flags(sub) -> None:
    sub.add_argument("--grid", type=int, default=DEFAULT_GRID)
    sub.add_argument("--starts", type=int, default=DEFAULT_STARTS)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _run_elimination(system, args, out_path) -> dict:
    elim, matrix = eliminate_system(
        system,
        d_max=args.degree_max,
        tol=args.rank_tol,
        row_scaling=args.row_scaling,
        variable_scaling=args.variable_scaling,
    )
    diagnostics = {
        "degree": elim.degree_used,
        "rows": matrix.n_rows,
        "cols": matrix.n_cols,
        "rank_M": elim.rank_M,
        "rank_N": elim.rank_N,
        "intersection_dim": elim.intersection_dim,
        "n_polynomials": len(elim.polynomials),
    }
    metadata = {
        "flags": _flag_record(
            args, ("degree_max", "rank_tol", "row_scaling", "variable_scaling")
        ),
        "diagnostics": diagnostics,
    }
    save_eliminant(elim, out_path, metadata=metadata)
    return diagnostics


def _cmd_eliminate(args) -> int:
    problem = load_problem(args.problem)
    system = build_pf_system(problem)
    out = args.output or str(Path(args.problem).with_suffix(".eliminant.json"))
    diagnostics = _run_elimination(system, args, out)
    _emit({"command": "eliminate", "output": out, **diagnostics})
    return 0


def _cmd_sample(args) -> int:
    problem = load_problem(args.problem)
    points = sample_front(
        problem, grid_resolution=args.grid, starts=args.starts, seed=args.seed
    )
    summary = {"command": "sample", "n_points": len(points)}
    if args.eliminant:
        elim = load_eliminant(args.eliminant)
        annotate_eliminant_residuals(points, elim)
        summary["max_eliminant_residual"] = max_eliminant_residual(points, elim)
    out = args.output or str(Path(args.problem).with_suffix(".front.csv"))
    write_front_csv(points, out)
    summary["output"] = out
    _emit(summary)
    return 0


def _cmd_verify(args) -> int:
    problem = load_problem(args.problem)
    elim = load_eliminant(args.eliminant)
    points = sample_front(
        problem, grid_resolution=args.grid, starts=args.starts, seed=args.seed
    )
    _emit(
        {
            "command": "verify",
            "n_points": len(points),
            "degree": elim.degree_used,
            "n_polynomials": len(elim.polynomials),
            "max_residual": max_eliminant_residual(points, elim),
        }
    )
    return 0


def _cmd_recover(args) -> int:
    elim = load_eliminant(args.eliminant)
    requested = _floats(args.at)
    if len(requested) != len(elim.objective_names):
        raise _UsageError(
            f"--at needs {len(elim.objective_names)} components, got {len(requested)}"
        )
    # User-supplied coordinates are usually rounded; weight recovery is only
    # defined on the variety, so snap to the nearest zero first.
    s, proj_residual = newton_project(elim, requested)
    w = recover_weights(elim, s, tol=args.tol)
    payload = {
        "command": "recover",
        "s_requested": list(requested),
        "s": [float(v) for v in s],
        "projection_residual": proj_residual,
        "feasible": w is not None,
        "weights": None if w is None else [float(v) for v in w],
    }
    if w is not None and args.problem:
        problem = load_problem(args.problem)
        critical = recover_decisions(
            problem,
            [float(v) for v in w],
            tol=args.tol,
            starts=args.starts,
            seed=args.seed,
        )
        payload["critical_points"] = [
            {
                "x": list(cp.x),
                "lambda": list(cp.lam),
                "kkt_residual": cp.kkt_residual,
                "weighted_value": cp.weighted_value,
            }
            for cp in critical
        ]
    _emit(payload)
    return 0


def _cmd_sysid(args) -> int:
    y = _floats(args.y)
    system = build_misfit_latency_pf(y, args.na)
    out = args.output or "misfit_latency.eliminant.json"
    diagnostics = _run_elimination(system, args, out)
    _emit(
        {
            "command": "sysid",
            "n_samples": len(y),
            "model_order": args.na,
            "output": out,
            **diagnostics,
        }
    )
    return 0


def _cmd_plot(args) -> int:
    from .plotting import plot_front

    points = read_front_csv(args.points)
    elim = load_eliminant(args.eliminant) if args.eliminant else None
    out = args.output or str(Path(args.points).with_suffix(".svg"))
    plot_front(points, out, elim=elim)
    _emit({"command": "plot", "n_points": len(points), "output": out})
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="elimfront", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_elim = sub.add_parser("eliminate", help="compute an eliminant system")
    p_elim.add_argument("problem")
    p_elim.add_argument("-o", "--output")
    _add_eliminate_flags(p_elim)
    p_elim.set_defaults(func=_cmd_eliminate)

    p_sample = sub.add_parser("sample", help="sample the front by scalarization")
    p_sample.add_argument("problem")
    p_sample.add_argument("-o", "--output")
    p_sample.add_argument("--eliminant", help="annotate residuals against this file")
    _add_sampling_flags(p_sample)
    p_sample.set_defaults(func=_cmd_sample)

    p_verify = sub.add_parser("verify", help="max eliminant residual at samples")
    p_verify.add_argument("problem")
    p_verify.add_argument("eliminant")
    _add_sampling_flags(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_recover = sub.add_parser("recover", help="weights (and decisions) at a point")
    p_recover.add_argument("eliminant")
    p_recover.add_argument("--at", required=True, help="objective point, e.g. --at=-16.59,4.74")
    p_recover.add_argument("--problem")
    p_recover.add_argument("--tol", type=float, default=DEFAULT_POINT_TOL)
    p_recover.add_argument("--starts", type=int, default=DEFAULT_STARTS)
    p_recover.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_recover.set_defaults(func=_cmd_recover)

    p_sysid = sub.add_parser("sysid", help="misfit-latency system from data")
    p_sysid.add_argument("--y", required=True, help="measured outputs, comma-separated")
    p_sysid.add_argument("--na", required=True, type=int, help="model order")
    p_sysid.add_argument("-o", "--output")
    _add_eliminate_flags(p_sysid)
    p_sysid.set_defaults(func=_cmd_sysid)

    p_plot = sub.add_parser("plot", help="SVG of sampled points and zero curve")
    p_plot.add_argument("points", help="front CSV")
    p_plot.add_argument("eliminant", nargs="?")
    p_plot.add_argument("-o", "--output")
    p_plot.set_defaults(func=_cmd_plot)

    return parser


def _error_payload(kind: str, exc: BaseException) -> str:
    return json.dumps(
        {"error": {"kind": kind, "type": type(exc).__name__, "message": str(exc)}},
        sort_keys=True,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(_error_payload("usage", exc), file=sys.stderr)
        return 1
    except (ProblemFormatError, json.JSONDecodeError, OSError) as exc:
        print(_error_payload("io-schema", exc), file=sys.stderr)
        return 3
    except (
        DegreeCapExceeded,
        NoConvergenceError,
        ZeroGradientError,
        FactorizationError,
        EmptyEliminantError,
        MemoryError,
    ) as exc:
        print(_error_payload("numerical", exc), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(_error_payload("usage", exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
