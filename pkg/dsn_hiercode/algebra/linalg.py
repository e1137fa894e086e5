"""
Dense matrices over GF(2^theta) and exact Gaussian elimination.

Entries are stored row-major in a read-only int64 numpy array; arithmetic
runs on the context's galois FieldArray class and every operation returns
a new matrix.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from dsn_hiercode.algebra.field import FieldContext, FieldElement
from dsn_hiercode.exceptions import DimensionError, DistinctnessError, FieldContextError
from dsn_hiercode.options import SolveKindOptions


@dataclass(frozen=True, eq=False)
class Matrix:
    ctx: FieldContext
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.int64, copy=True)
        if data.ndim != 2:
            raise DimensionError(f"Matrix data must be 2-D, got {data.ndim}-D")
        if data.size and (data.min() < 0 or data.max() >= self.ctx.q):
            raise FieldContextError(f"Matrix entries outside GF({self.ctx.q})")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, ctx: FieldContext, rows: int, cols: int) -> "Matrix":
        return cls(ctx, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, ctx: FieldContext, size: int) -> "Matrix":
        return cls(ctx, np.eye(size, dtype=np.int64))

    @classmethod
    def from_rows(cls, ctx: FieldContext, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "Matrix":
        if len(rows) == 0:
            return cls.zeros(ctx, 0, cols or 0)
        return cls(ctx, np.array([[int(v) for v in row] for row in rows], dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def entries(self) -> List[FieldElement]:
        return [FieldElement(self.ctx, int(v)) for v in self.data.ravel()]

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.ctx, int(self.data[i, j]))

    def submatrix(self, row_index, col_index) -> "Matrix":
        return Matrix(self.ctx, self.data[np.ix_(list(row_index), list(col_index))])

    def transpose(self) -> "Matrix":
        return Matrix(self.ctx, self.data.T)

    def is_zero(self) -> bool:
        return not self.data.any()

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ctx == other.ctx and self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self) -> str:
        return f"Matrix(GF({self.ctx.q}), {self.rows}x{self.cols})"

    def tolist(self) -> List[List[int]]:
        return self.data.tolist()


@dataclass(frozen=True)
class SolveOutcome:
    """
    Result of a linear solve. `values` is a particular solution with free
    variables set to zero, and `determined[j]` is True when variable j takes
    the same value in every solution.
    """
    kind: SolveKindOptions
    solution: Optional[Matrix] = None
    free_columns: Tuple[int, ...] = ()
    determined: Tuple[bool, ...] = ()
    values: Optional[np.ndarray] = field(default=None, compare=False, repr=False)


def _check_same_field(x: Matrix, y: Matrix):
    if x.ctx != y.ctx:
        raise FieldContextError("Matrices belong to different field contexts")


def cauchy(ctx: FieldContext, a: Sequence[FieldElement], b: Sequence[FieldElement]) -> Matrix:
    """
    Cauchy matrix with entry (i, j) = 1 / (a_i - b_j)
    :param ctx: field context
    :param a: row elements
    :param b: column elements
    :return: len(a) x len(b) matrix
    """
    values = [int(e) for e in list(a) + list(b)]
    if len(set(values)) != len(values):
        duplicates = sorted({v for v in values if values.count(v) > 1})
        raise DistinctnessError("Cauchy elements must be pairwise distinct",
                                duplicates=[hex(v) for v in duplicates])
    for element in list(a) + list(b):
        if element.ctx != ctx:
            raise FieldContextError("Cauchy element from a different field context")
    if len(a) == 0 or len(b) == 0:
        return Matrix.zeros(ctx, len(a), len(b))
    differences = ctx.array([int(e) for e in a])[:, np.newaxis] - ctx.array([int(e) for e in b])[np.newaxis, :]
    return Matrix(ctx, ctx.ints(np.reciprocal(differences)))


def mat_mul(x: Matrix, y: Matrix) -> Matrix:
    _check_same_field(x, y)
    if x.cols != y.rows:
        raise DimensionError(f"Cannot multiply {x.rows}x{x.cols} by {y.rows}x{y.cols}",
                             left=list(x.shape), right=list(y.shape))
    return Matrix(x.ctx, x.ctx.dot(x.data, y.data))


def rref(ctx: FieldContext, data: np.ndarray, pivot_limit: Optional[int] = None) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form. The pivot for each column is the first nonzero
    entry at or below the current row; only the first `pivot_limit` columns
    are eligible as pivots.
    """
    reduced = ctx.array(np.array(data, dtype=np.int64, copy=True))
    rows, cols = reduced.shape
    limit = cols if pivot_limit is None else pivot_limit
    pivots: List[int] = []
    row = 0
    for col in range(limit):
        if row == rows:
            break
        candidates = np.nonzero(reduced[row:, col].view(np.ndarray))[0]
        if candidates.size == 0:
            continue
        pivot_row = row + int(candidates[0])
        if pivot_row != row:
            reduced[[row, pivot_row]] = reduced[[pivot_row, row]]
        reduced[row] = reduced[row] / reduced[row, col]
        others = np.nonzero(reduced[:, col].view(np.ndarray))[0]
        others = others[others != row]
        if others.size:
            reduced[others] = reduced[others] - reduced[others, col][:, np.newaxis] * reduced[row][np.newaxis, :]
        pivots.append(col)
        row += 1
    return ctx.ints(reduced), pivots


def rank(x: Matrix) -> int:
    if x.data.size == 0:
        return 0
    return int(np.linalg.matrix_rank(x.ctx.array(x.data)))


def null_space_basis(x: Matrix) -> Matrix:
    """Basis, as rows, of {v : v . x^T = 0}."""
    reduced, pivots = rref(x.ctx, x.data)
    free = [c for c in range(x.cols) if c not in pivots]
    basis = np.zeros((len(free), x.cols), dtype=np.int64)
    for index, col in enumerate(free):
        basis[index, col] = 1
        for row, pivot in enumerate(pivots):
            basis[index, pivot] = reduced[row, col]
    return Matrix(x.ctx, basis)


def solve(coeff: Matrix, rhs: Matrix) -> SolveOutcome:
    """
    Solve coeff . X = rhs for X (coeff.cols x rhs.cols)
    :param coeff: coefficient matrix, one equation per row
    :param rhs: right-hand sides, same number of rows as coeff
    :return: Unique, Underdetermined (with free column indices) or Inconsistent
    """
    _check_same_field(coeff, rhs)
    if coeff.rows != rhs.rows:
        raise DimensionError(f"coeff has {coeff.rows} rows but rhs has {rhs.rows}")
    ctx = coeff.ctx
    unknowns = coeff.cols
    augmented = np.hstack([coeff.data, rhs.data]) if coeff.rows else np.zeros((0, unknowns + rhs.cols), np.int64)
    reduced, pivots = rref(ctx, augmented, pivot_limit=unknowns)

    leftover = reduced[len(pivots):, unknowns:]
    if leftover.any():
        return SolveOutcome(kind=SolveKindOptions.inconsistent)

    free = tuple(c for c in range(unknowns) if c not in pivots)
    values = np.zeros((unknowns, rhs.cols), dtype=np.int64)
    determined = [False] * unknowns
    for row, pivot in enumerate(pivots):
        values[pivot] = reduced[row, unknowns:]
        determined[pivot] = not any(reduced[row, f] for f in free)

    if free:
        return SolveOutcome(kind=SolveKindOptions.underdetermined, free_columns=free,
                            determined=tuple(determined), values=values)
    return SolveOutcome(kind=SolveKindOptions.unique, solution=Matrix(ctx, values),
                        determined=tuple(determined), values=values)


def is_invertible(x: Matrix) -> bool:
    return x.rows == x.cols and rank(x) == x.rows
