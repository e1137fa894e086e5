from itertools import combinations

import pytest

from dsn_hiercode.algebra.field import enumerate_elements
from dsn_hiercode.algebra.linalg import (Matrix, cauchy, is_invertible, mat_mul, null_space_basis, rank,
                                         solve)
from dsn_hiercode.exceptions import DimensionError, DistinctnessError, FieldContextError
from dsn_hiercode.options import SolveKindOptions


def random_matrix(ctx, rng, rows, cols):
    return Matrix(ctx, rng.integers(0, ctx.q, size=(rows, cols)))


def test_cauchy_entries(gf16):
    elements = enumerate_elements(gf16, 5)
    C = cauchy(gf16, elements[:2], elements[2:])
    assert C.shape == (2, 3)
    for i in range(2):
        for j in range(3):
            assert C.entry(i, j) * (elements[i] - elements[2 + j]) == gf16.one


def test_cauchy_rejects_repeated_elements(gf16):
    elements = enumerate_elements(gf16, 3)
    with pytest.raises(DistinctnessError):
        cauchy(gf16, elements[:2], elements[1:])


def test_every_square_submatrix_of_cauchy_gf16_is_invertible(gf16):
    elements = enumerate_elements(gf16, 8)
    C = cauchy(gf16, elements[:4], elements[4:])
    checked = 0
    for size in range(1, 5):
        for rows in combinations(range(4), size):
            for cols in combinations(range(4), size):
                assert is_invertible(C.submatrix(rows, cols))
                checked += 1
    assert checked == 69


@pytest.mark.slow
def test_random_square_submatrices_of_cauchy_gf256_are_invertible(gf256, rng):
    elements = enumerate_elements(gf256, 256)
    C = cauchy(gf256, elements[:128], elements[128:])
    for _ in range(1000):
        size = int(rng.integers(1, 9))
        rows = sorted(rng.choice(128, size=size, replace=False))
        cols = sorted(rng.choice(128, size=size, replace=False))
        assert is_invertible(C.submatrix(rows, cols))


def test_identity_product(gf16, rng):
    x = random_matrix(gf16, rng, 3, 5)
    assert Matrix.identity(gf16, 3) @ x == x
    assert x @ Matrix.identity(gf16, 5) == x


def test_product_dimension_mismatch(gf16):
    with pytest.raises(DimensionError):
        mat_mul(Matrix.zeros(gf16, 2, 3), Matrix.zeros(gf16, 2, 3))


def test_entries_must_lie_in_field(gf16):
    with pytest.raises(FieldContextError):
        Matrix(gf16, [[1, 16]])


def test_solve_unique(gf16, rng):
    elements = enumerate_elements(gf16, 6)
    coeff = cauchy(gf16, elements[:3], elements[3:])
    x = random_matrix(gf16, rng, 3, 2)
    outcome = solve(coeff, coeff @ x)
    assert outcome.kind == SolveKindOptions.unique
    assert outcome.solution == x
    assert all(outcome.determined)


def test_solve_underdetermined(gf16):
    outcome = solve(Matrix.from_rows(gf16, [[1, 1]]), Matrix.from_rows(gf16, [[5]]))
    assert outcome.kind == SolveKindOptions.underdetermined
    assert outcome.free_columns == (1,)
    assert outcome.determined == (False, False)


def test_solve_partially_determined(gf16):
    coeff = Matrix.from_rows(gf16, [[1, 0, 0], [0, 1, 1]])
    outcome = solve(coeff, Matrix.from_rows(gf16, [[7], [3]]))
    assert outcome.kind == SolveKindOptions.underdetermined
    assert outcome.determined == (True, False, False)
    assert outcome.values[0, 0] == 7


def test_solve_inconsistent(gf16):
    outcome = solve(Matrix.from_rows(gf16, [[1], [1]]), Matrix.from_rows(gf16, [[1], [2]]))
    assert outcome.kind == SolveKindOptions.inconsistent


@pytest.mark.parametrize("rows, cols", [(3, 5), (5, 3), (4, 4), (1, 6)])
def test_rank_plus_left_null_space(gf16, rng, rows, cols):
    for _ in range(20):
        x = random_matrix(gf16, rng, rows, cols)
        basis = null_space_basis(x.transpose())
        assert rank(x) + basis.rows == x.rows
        assert (basis @ x).is_zero()


def test_rank_of_repeated_rows(gf16):
    x = Matrix.from_rows(gf16, [[1, 2, 3], [1, 2, 3], [0, 0, 0]])
    assert rank(x) == 1
    assert not is_invertible(x)
    basis = null_space_basis(x)
    assert basis.rows == 2
    assert (x @ basis.transpose()).is_zero()
