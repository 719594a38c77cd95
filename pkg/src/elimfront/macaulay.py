"""Macaulay matrix assembly for polynomial systems.

The degree-d Macaulay matrix of a system stacks the coefficient vectors of
every shifted equation ``mono * eq`` whose total degree stays within d, one
column per monomial of degree <= d in the system's variable space.  Rows are
grouped by total row degree (equation degree plus shift degree), so raising
d only appends rows and columns: the degree-d matrix is the top-left block
of the degree-(d+1) matrix, bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.io
import scipy.sparse

from .polyring import (
    Monomial,
    VariableSpace,
    monomial_mul,
    monomials_of_degree,
    monomials_up_to,
)
from .problem import PFSystem

#: Above this many entries a freshly built matrix defaults to sparse storage.
DENSE_ENTRY_LIMIT = 10_000_000


def macaulay_shape(system: PFSystem, degree: int) -> tuple[int, int]:
    """Predicted (rows, cols) without assembling anything.

    Each equation of degree d_i <= d contributes one row per shift monomial
    of degree <= d - d_i, i.e. C(V + d - d_i, d - d_i) rows over V variables.
    """
    nvars = len(system.space)
    rows = 0
    for eq in system.equations:
        d_i = eq.degree
        if 0 <= d_i <= degree:
            rows += math.comb(nvars + degree - d_i, degree - d_i)
    cols = math.comb(nvars + degree, degree)
    return rows, cols


def _row_entries(eq, shift: Monomial, col_index: dict[Monomial, int]):
    """Column indices and coefficients of the row for ``shift * eq``.

    The scaling norm is computed from the coefficient list with exact
    summation so that dense and sparse assembly, and assembly at different
    target degrees, produce identical bits.
    """
    cols = []
    vals = []
    for mono, coeff in eq.terms.items():
        cols.append(col_index[monomial_mul(mono, shift)])
        vals.append(coeff)
    return cols, vals


def _scale(vals: list[float]) -> list[float]:
    nrm = math.sqrt(math.fsum(v * v for v in vals))
    return [v / nrm for v in vals]


@dataclass(eq=False)
class MacaulayMatrix:
    """Assembled Macaulay matrix plus the bookkeeping to interpret it.

    ``row_equations[r]`` / ``row_shifts[r]`` identify row r as the shift of
    one source equation; ``columns[c]`` is the monomial labelling column c.
    """

    space: VariableSpace
    degree: int
    array: "np.ndarray | scipy.sparse.csr_matrix"
    columns: tuple[Monomial, ...]
    row_equations: tuple[int, ...]
    row_shifts: tuple[Monomial, ...]
    row_scaling: bool

    @property
    def shape(self) -> tuple[int, int]:
        return self.array.shape

    @property
    def n_rows(self) -> int:
        return self.array.shape[0]

    @property
    def n_cols(self) -> int:
        return self.array.shape[1]

    @property
    def is_sparse(self) -> bool:
        return scipy.sparse.issparse(self.array)

    def to_dense(self) -> np.ndarray:
        if self.is_sparse:
            return self.array.toarray()
        return self.array


def _iter_rows(system: PFSystem, t_lo: int, t_hi: int, col_index, row_scaling: bool):
    """Yield (eq_index, shift, cols, vals) for total row degrees t_lo..t_hi."""
    for t in range(t_lo, t_hi + 1):
        for i, eq in enumerate(system.equations):
            k = t - eq.degree
            if eq.degree < 0 or k < 0:
                continue
            for shift in monomials_of_degree(system.space, k):
                cols, vals = _row_entries(eq, shift, col_index)
                if row_scaling:
                    vals = _scale(vals)
                yield i, shift, cols, vals


def build_macaulay(
    system: PFSystem,
    degree: int,
    row_scaling: bool = True,
    sparse: bool | None = None,
) -> MacaulayMatrix:
    """Assemble the degree-``degree`` Macaulay matrix of ``system``.

    ``sparse=None`` picks dense storage unless the matrix would exceed
    ``DENSE_ENTRY_LIMIT`` entries.  Row scaling normalizes every row to unit
    2-norm, which keeps the singular-value based rank decisions meaningful
    when equation coefficients span many orders of magnitude.
    """
    if degree < 0:
        raise ValueError("Macaulay degree must be nonnegative")
    # a system without nonzero equations degenerates to a 0 x q_d matrix
    min_deg = min((eq.degree for eq in system.equations if eq.degree >= 0), default=0)
    if degree < min_deg:
        raise ValueError(
            f"degree {degree} is below the smallest equation degree {min_deg}"
        )

    columns = tuple(monomials_up_to(system.space, degree))
    col_index = {m: j for j, m in enumerate(columns)}
    p, q = macaulay_shape(system, degree)
    if sparse is None:
        sparse = p * q > DENSE_ENTRY_LIMIT

    row_eqs: list[int] = []
    row_shifts: list[Monomial] = []
    if sparse:
        data: list[float] = []
        row_idx: list[int] = []
        col_idx: list[int] = []
        for i, shift, cols, vals in _iter_rows(system, 0, degree, col_index, row_scaling):
            r = len(row_eqs)
            row_eqs.append(i)
            row_shifts.append(shift)
            row_idx.extend([r] * len(cols))
            col_idx.extend(cols)
            data.extend(vals)
        array = scipy.sparse.coo_matrix(
            (data, (row_idx, col_idx)), shape=(p, q)
        ).tocsr()
    else:
        array = np.zeros((p, q))
        for i, shift, cols, vals in _iter_rows(system, 0, degree, col_index, row_scaling):
            r = len(row_eqs)
            row_eqs.append(i)
            row_shifts.append(shift)
            array[r, cols] = vals

    assert len(row_eqs) == p, "assembled row count disagrees with the formula"
    return MacaulayMatrix(
        space=system.space,
        degree=degree,
        array=array,
        columns=columns,
        row_equations=tuple(row_eqs),
        row_shifts=tuple(row_shifts),
        row_scaling=row_scaling,
    )


def extend_macaulay(
    matrix: MacaulayMatrix, system: PFSystem, new_degree: int
) -> MacaulayMatrix:
    """Grow an assembled matrix to a higher degree, reusing existing rows.

    Existing rows only gain zero entries in the new columns, so they are
    copied verbatim; only rows of total degree above the old bound are
    assembled.  The result equals ``build_macaulay(system, new_degree)``.
    """
    if matrix.space != system.space:
        raise ValueError("matrix and system use different variable spaces")
    if new_degree < matrix.degree:
        raise ValueError("new degree must not be smaller than the current one")
    if new_degree == matrix.degree:
        return matrix

    columns = tuple(monomials_up_to(system.space, new_degree))
    col_index = {m: j for j, m in enumerate(columns)}
    p, q = macaulay_shape(system, new_degree)
    p0, q0 = matrix.shape

    row_eqs = list(matrix.row_equations)
    row_shifts = list(matrix.row_shifts)
    new_rows = list(
        _iter_rows(system, matrix.degree + 1, new_degree, col_index, matrix.row_scaling)
    )

    if matrix.is_sparse or p * q > DENSE_ENTRY_LIMIT:
        old = matrix.array.tocsr() if matrix.is_sparse else scipy.sparse.csr_matrix(matrix.array)
        old = scipy.sparse.csr_matrix(
            (old.data, old.indices, old.indptr), shape=(p0, q)
        )
        data: list[float] = []
        row_idx: list[int] = []
        col_idx: list[int] = []
        for i, shift, cols, vals in new_rows:
            r = len(row_eqs) - p0
            row_eqs.append(i)
            row_shifts.append(shift)
            row_idx.extend([r] * len(cols))
            col_idx.extend(cols)
            data.extend(vals)
        tail = scipy.sparse.coo_matrix((data, (row_idx, col_idx)), shape=(p - p0, q))
        array = scipy.sparse.vstack([old, tail]).tocsr()
    else:
        array = np.zeros((p, q))
        array[:p0, :q0] = matrix.to_dense()
        for i, shift, cols, vals in new_rows:
            r = len(row_eqs)
            row_eqs.append(i)
            row_shifts.append(shift)
            array[r, cols] = vals

    assert len(row_eqs) == p
    return MacaulayMatrix(
        space=system.space,
        degree=new_degree,
        array=array,
        columns=columns,
        row_equations=tuple(row_eqs),
        row_shifts=tuple(row_shifts),
        row_scaling=matrix.row_scaling,
    )


@dataclass(frozen=True)
class ColumnSplit:
    """Partition of Macaulay columns by whether their monomial touches a
    variable slated for elimination.  ``kept_indices`` always includes the
    constant column."""

    eliminated_names: tuple[str, ...]
    eliminated_indices: tuple[int, ...]
    kept_indices: tuple[int, ...]


def split_columns(matrix: MacaulayMatrix, eliminated_names: Sequence[str]) -> ColumnSplit:
    positions = [matrix.space.index(n) for n in eliminated_names]
    elim: list[int] = []
    kept: list[int] = []
    for j, mono in enumerate(matrix.columns):
        if any(mono[i] for i in positions):
            elim.append(j)
        else:
            kept.append(j)
    return ColumnSplit(tuple(eliminated_names), tuple(elim), tuple(kept))


def take_columns(matrix: MacaulayMatrix, indices: Sequence[int]) -> np.ndarray:
    """Dense submatrix of the given columns (in the given order)."""
    idx = list(indices)
    if matrix.is_sparse:
        return matrix.array.tocsc()[:, idx].toarray()
    return matrix.array[:, idx]


def save_macaulay(matrix: MacaulayMatrix, mtx_path: str, meta_path: str) -> None:
    """Write the matrix in Matrix Market form plus a JSON sidecar that maps
    rows back to (equation, shift) pairs and columns back to monomials."""
    coo = (
        matrix.array.tocoo()
        if matrix.is_sparse
        else scipy.sparse.coo_matrix(matrix.array)
    )
    scipy.io.mmwrite(mtx_path, coo)
    names = matrix.space.names
    meta = {
        "degree": matrix.degree,
        "shape": list(matrix.shape),
        "row_scaling": matrix.row_scaling,
        "variables": list(names),
        "roles": list(matrix.space.roles),
        "columns": [
            {n: e for n, e in zip(names, mono) if e} for mono in matrix.columns
        ],
        "rows": [
            {
                "equation": eq,
                "shift": {n: e for n, e in zip(names, shift) if e},
            }
            for eq, shift in zip(matrix.row_equations, matrix.row_shifts)
        ],
    }
    with open(meta_path, "w") as fh:
        json.dump(meta, fh)
        fh.write("\n")
