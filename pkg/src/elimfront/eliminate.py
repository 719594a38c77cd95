"""Numerical elimination on Macaulay matrices.

Given the Macaulay matrix M_d of a stationarity system and the split of its
columns into those touching elimination variables (the submatrix N_d) and
those supported on objective variables only, the dimension of the
intersection of the row space with the objective-only coefficient space is
rank(M_d) - rank(N_d) by Grassmann's dimension theorem.  Once positive, an
orthonormal basis V of the left null space of N_d turns V^T M_d into
coefficient vectors of polynomials in the objective variables alone: the
eliminant system.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .macaulay import (
    ColumnSplit,
    MacaulayMatrix,
    build_macaulay,
    extend_macaulay,
    split_columns,
    take_columns,
)
from .polyring import Monomial, Polynomial, VariableSpace
from .problem import PFSystem

#: Default relative rank tolerance: singular values below
#: tol * sigma_max * max(rows, cols) count as zero.
DEFAULT_RANK_TOL = 1e-12

#: Default cap for the degree search.
DEFAULT_DEGREE_CAP = 12

#: After normalizing a polynomial to unit maximum coefficient, entries below
#: this fraction of the maximum are zeroed out.
COEFF_CLEANUP = 1e-10


class DegreeCapExceeded(RuntimeError):
    """No eliminant exists at any degree up to the cap."""

    def __init__(self, cap: int, profile: dict[int, int]):
        self.cap = cap
        self.profile = dict(profile)
        msg = ", ".join(f"d={d}: dim {v}" for d, v in sorted(profile.items()))
        super().__init__(
            f"no eliminant found up to degree {cap} (intersection profile: {msg})"
        )


class EmptyEliminantError(RuntimeError):
    """Every candidate row fell below the coefficient threshold even though
    the rank condition promised at least one; the tolerance is misconfigured."""


class FactorizationError(RuntimeError):
    """Both SVD drivers failed to converge."""


def _svdvals(a: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.svd(a, compute_uv=False, lapack_driver="gesdd")
    except scipy.linalg.LinAlgError:
        pass
    try:
        return scipy.linalg.svd(a, compute_uv=False, lapack_driver="gesvd")
    except scipy.linalg.LinAlgError as exc:
        raise FactorizationError(f"SVD did not converge: {exc}") from exc


def _svd(a: np.ndarray, full_matrices: bool):
    try:
        return scipy.linalg.svd(a, full_matrices=full_matrices, lapack_driver="gesdd")
    except scipy.linalg.LinAlgError:
        pass
    try:
        return scipy.linalg.svd(a, full_matrices=full_matrices, lapack_driver="gesvd")
    except scipy.linalg.LinAlgError as exc:
        raise FactorizationError(f"SVD did not converge: {exc}") from exc


def numerical_rank(a: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values above tol * sigma_max * max(a.shape).

    An all-zero (or empty) matrix has rank 0.
    """
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0
    sigma = _svdvals(a)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    cutoff = tol * sigma[0] * max(a.shape)
    return int(np.count_nonzero(sigma > cutoff))


def intersection_dimension(
    matrix: MacaulayMatrix, split: ColumnSplit, tol: float = DEFAULT_RANK_TOL
) -> int:
    """dim of (row space of M) ∩ (coefficient space of kept monomials),
    computed as rank(M) - rank(N)."""
    m = matrix.to_dense()
    n = m[:, list(split.eliminated_indices)]
    return numerical_rank(m, tol) - numerical_rank(n, tol)


def _target_dim(system: PFSystem, min_dim: int | None) -> int:
    """Intersection dimension the degree search must reach.

    Defaults to the front codimension recorded by the system builder (one
    independent relation suffices only when the front is a hypersurface of
    the objective space; a lower-dimensional front needs more).
    """
    if min_dim is not None:
        if min_dim < 1:
            raise ValueError("min_dim must be at least 1")
        return min_dim
    return max(1, int(system.diagnostics.get("target_intersection_dim", 1)))


def _shift_poly(p: Polynomial, shift_by_index: Mapping[int, int]) -> Polynomial:
    """Substitute v -> 2^k v for the given variable indices (exact: ldexp)."""
    terms = {}
    for mono, coeff in p.terms.items():
        e = sum(mono[j] * k for j, k in shift_by_index.items())
        terms[mono] = math.ldexp(coeff, e)
    return Polynomial(p.space, terms)


def equilibrate_variables(system: PFSystem) -> tuple[PFSystem, dict[str, int]]:
    """Rescale the eliminated variables by powers of two to flatten the
    spread of coefficient magnitudes across the system.

    Fits, by least squares in log2 space, one exponent per eliminated
    variable and one per equation so that ``|a| * 2^(sum_v alpha_v k_v + r_i)``
    is as close to 1 as possible over all terms, then rounds the variable
    exponents to integers.  Substituting ``v -> 2^k v`` multiplies every
    coefficient by an exact power of two, so the result is a bit-exact
    reparametrization: degrees, matrix shapes and exact ranks are unchanged,
    and polynomials extracted in the kept variables need no back transform.
    What improves is the singular-value separation between range and noise
    when variable magnitudes are lopsided (a budget of 100 against
    multipliers of order 0.01, say).

    Returns the rescaled system and the exponent map (empty when every
    fitted exponent rounds to zero, in which case the input is returned
    unchanged).
    """
    space = system.space
    elim_idx = [space.index(n) for n in system.eliminated_names]
    pos = {j: col for col, j in enumerate(elim_idx)}
    n_var = len(elim_idx)
    rows = []
    rhs = []
    for i, eq in enumerate(system.equations):
        for mono, coeff in eq.terms.items():
            if coeff == 0.0:
                continue
            row = np.zeros(n_var + len(system.equations))
            for j in elim_idx:
                if mono[j]:
                    row[pos[j]] = mono[j]
            row[n_var + i] = 1.0
            rows.append(row)
            rhs.append(-math.log2(abs(coeff)))
    if not rows:
        return system, {}
    sol, *_ = np.linalg.lstsq(np.asarray(rows), np.asarray(rhs), rcond=None)
    shifts = {}
    for j in elim_idx:
        k = int(np.clip(np.rint(sol[pos[j]]), -64, 64))
        if k:
            shifts[space.names[j]] = k
    if not shifts:
        return system, {}
    shift_by_index = {space.index(n): k for n, k in shifts.items()}
    diagnostics = dict(system.diagnostics)
    diagnostics["variable_scales"] = {n: float(2.0**k) for n, k in shifts.items()}
    rescaled = PFSystem(
        space=space,
        equations=tuple(_shift_poly(eq, shift_by_index) for eq in system.equations),
        eliminated_names=system.eliminated_names,
        kept_names=system.kept_names,
        diagnostics=diagnostics,
    )
    return rescaled, shifts


def find_eliminant_degree(
    system: PFSystem,
    d_max: int = DEFAULT_DEGREE_CAP,
    tol: float = DEFAULT_RANK_TOL,
    min_dim: int | None = None,
    variable_scaling: bool = True,
) -> int:
    """Smallest Macaulay degree whose intersection reaches the target
    dimension (see ``_target_dim``).

    Starts at the largest equation degree and increments by one; raises
    DegreeCapExceeded (carrying the whole dimension profile) when d_max is
    passed without success.
    """
    needed = _target_dim(system, min_dim)
    if variable_scaling:
        system, _ = equilibrate_variables(system)
    d0 = max(eq.degree for eq in system.equations if eq.degree >= 0)
    if d_max < d0:
        raise ValueError(f"d_max {d_max} is below the largest equation degree {d0}")
    profile: dict[int, int] = {}
    matrix = None
    for d in range(d0, d_max + 1):
        matrix = (
            build_macaulay(system, d)
            if matrix is None
            else extend_macaulay(matrix, system, d)
        )
        split = split_columns(matrix, system.eliminated_names)
        dim = intersection_dimension(matrix, split, tol)
        profile[d] = dim
        if dim >= needed:
            return d
    raise DegreeCapExceeded(d_max, profile)


@dataclass(frozen=True)
class EliminantSystem:
    """Polynomials in the objective variables vanishing on the projected
    variety of the source system."""

    polynomials: tuple[Polynomial, ...]
    degree_used: int
    rank_M: int
    rank_N: int
    tolerance_used: float

    @property
    def intersection_dim(self) -> int:
        return self.rank_M - self.rank_N

    @property
    def objective_names(self) -> tuple[str, ...]:
        return self.polynomials[0].space.names

    def residual(self, s: Sequence[float]) -> float:
        """Largest |t_i(s)| over the system (coefficients are normalized)."""
        point = dict(zip(self.objective_names, s))
        return max(abs(t.evaluate(point)) for t in self.polynomials)

    def residuals(self, s: Sequence[float]) -> tuple[float, ...]:
        point = dict(zip(self.objective_names, s))
        return tuple(t.evaluate(point) for t in self.polynomials)


def _normalize(coeffs: np.ndarray) -> np.ndarray:
    """Divide by the (signed) largest-magnitude entry, then zero out noise
    below COEFF_CLEANUP of the new maximum."""
    lead = coeffs[np.argmax(np.abs(coeffs))]
    out = coeffs / lead
    out[np.abs(out) < COEFF_CLEANUP] = 0.0
    return out


def extract_eliminant(
    matrix: MacaulayMatrix,
    split: ColumnSplit,
    tol: float = DEFAULT_RANK_TOL,
) -> EliminantSystem:
    """Turn the left null space of N_d into polynomials in the kept variables.

    Steps: full SVD of N_d gives an orthonormal basis V of its left null
    space; S^T = V^T M_d is supported (up to noise) on kept columns only;
    rows whose kept-column norm exceeds ``tol`` survive; a rank-revealing QR
    on the kept block selects a linearly independent subset, which is
    normalized to unit maximum coefficient.
    """
    m = matrix.to_dense()
    n = m[:, list(split.eliminated_indices)]
    p = m.shape[0]

    u, sigma, _ = _svd(n, full_matrices=n.shape[0] > n.shape[1])
    if sigma.size and sigma[0] > 0.0:
        cutoff = tol * sigma[0] * max(n.shape)
        rank_n = int(np.count_nonzero(sigma > cutoff))
    else:
        rank_n = 0
    rank_m = numerical_rank(m, tol)
    if rank_m - rank_n < 1:
        raise ValueError(
            f"no eliminant at degree {matrix.degree}: "
            f"rank(M)={rank_m}, rank(N)={rank_n}"
        )

    null_basis = u[:, rank_n:p]  # orthonormal, (p - rank_N) columns
    s_t = null_basis.T @ m
    kept = s_t[:, list(split.kept_indices)]

    row_norms = np.linalg.norm(kept, axis=1)
    strong = np.nonzero(row_norms > tol)[0]
    if strong.size == 0:
        raise EmptyEliminantError(
            f"all {kept.shape[0]} candidate rows fall below threshold {tol}"
        )
    kept = kept[strong]

    # Rank-revealing selection of independent rows: QR with column pivoting
    # on the transpose ranks rows by residual norm.  The number of
    # independent eliminant rows is the Grassmann intersection dimension
    # rank(M) - rank(N); taking exactly that many from the pivot order keeps
    # noise rows out even when the null basis is much larger.
    n_keep = min(rank_m - rank_n, strong.size)
    _, _, piv = scipy.linalg.qr(kept.T, mode="economic", pivoting=True)
    chosen = np.sort(piv[:n_keep])
    rows = kept[chosen]

    kept_space = _kept_space(matrix.space, split)
    kept_monos = [
        _restrict_monomial(matrix.columns[j], matrix.space, kept_space)
        for j in split.kept_indices
    ]
    polys = []
    for row in rows:
        coeffs = _normalize(row.copy())
        terms = {
            mono: c for mono, c in zip(kept_monos, coeffs) if c != 0.0
        }
        polys.append(Polynomial(kept_space, terms))
    return EliminantSystem(
        polynomials=tuple(polys),
        degree_used=matrix.degree,
        rank_M=rank_m,
        rank_N=rank_n,
        tolerance_used=tol,
    )


def _kept_space(space: VariableSpace, split: ColumnSplit) -> VariableSpace:
    """Sub-space of the variables not slated for elimination, in order."""
    dropped = set(split.eliminated_names)
    pairs = [(n, r) for n, r in zip(space.names, space.roles) if n not in dropped]
    return VariableSpace(tuple(n for n, _ in pairs), tuple(r for _, r in pairs))


def _restrict_monomial(
    mono: Monomial, space: VariableSpace, target: VariableSpace
) -> Monomial:
    exps = [0] * len(target)
    for name, e in zip(space.names, mono):
        if e:
            exps[target.index(name)] = e
    return tuple(exps)


def eliminate_system(
    system: PFSystem,
    d_max: int = DEFAULT_DEGREE_CAP,
    tol: float = DEFAULT_RANK_TOL,
    row_scaling: bool = True,
    min_dim: int | None = None,
    variable_scaling: bool = True,
) -> tuple[EliminantSystem, MacaulayMatrix]:
    """Full pipeline: degree search, then extraction at the found degree.

    With ``variable_scaling`` on (the default) the eliminated variables are
    first rebalanced by exact powers of two (``equilibrate_variables``); the
    returned Macaulay matrix is that of the rebalanced system, whose shape,
    degree and exact ranks match the original's.
    """
    needed = _target_dim(system, min_dim)
    if variable_scaling:
        system, _ = equilibrate_variables(system)
    d0 = max(eq.degree for eq in system.equations if eq.degree >= 0)
    if d_max < d0:
        raise ValueError(f"d_max {d_max} is below the largest equation degree {d0}")
    profile: dict[int, int] = {}
    matrix = None
    for d in range(d0, d_max + 1):
        matrix = (
            build_macaulay(system, d, row_scaling=row_scaling)
            if matrix is None
            else extend_macaulay(matrix, system, d)
        )
        split = split_columns(matrix, system.eliminated_names)
        dim = intersection_dimension(matrix, split, tol)
        profile[d] = dim
        if dim >= needed:
            return extract_eliminant(matrix, split, tol), matrix
    raise DegreeCapExceeded(d_max, profile)


# -- eliminant file I/O -------------------------------------------------------


def eliminant_to_dict(elim: EliminantSystem, metadata: Mapping | None = None) -> dict:
    data = {
        "degree": elim.degree_used,
        "rank_M": elim.rank_M,
        "rank_N": elim.rank_N,
        "intersection_dim": elim.intersection_dim,
        "tolerance": elim.tolerance_used,
        "objective_vars": list(elim.objective_names),
        "polynomials": [t.to_term_list() for t in elim.polynomials],
    }
    if metadata:
        data["metadata"] = dict(metadata)
    return data


def eliminant_from_dict(data: Mapping) -> EliminantSystem:
    names = tuple(data["objective_vars"])
    space = VariableSpace.from_groups(objective=names)
    polys = tuple(
        Polynomial.from_term_list(space, tl) for tl in data["polynomials"]
    )
    return EliminantSystem(
        polynomials=polys,
        degree_used=int(data["degree"]),
        rank_M=int(data["rank_M"]),
        rank_N=int(data["rank_N"]),
        tolerance_used=float(data["tolerance"]),
    )


def save_eliminant(
    elim: EliminantSystem, path: str, metadata: Mapping | None = None
) -> None:
    with open(path, "w") as fh:
        json.dump(eliminant_to_dict(elim, metadata), fh, indent=2)
        fh.write("\n")


def load_eliminant(path: str) -> EliminantSystem:
    with open(path) as fh:
        data = json.load(fh)
    return eliminant_from_dict(data)
