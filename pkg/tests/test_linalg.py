import pytest

from lscomp import (
    Matrix,
    SingularMatrixError,
    block_diag,
    cauchy_mds,
    hstack,
    invert,
    left_null_space,
    make_rng,
    matmul,
    random_matrix,
    rank,
    rref,
    solve,
    vstack,
)
from lscomp.prime_field import FieldMismatchError


def brute_matmul(a: Matrix, b: Matrix) -> Matrix:
    """Independent triple-loop product oracle."""
    f = a.field
    out = [[0] * b.cols for _ in range(a.rows)]
    for i in range(a.rows):
        for j in range(b.cols):
            acc = 0
            for k in range(a.cols):
                acc = f.add(acc, f.mul(a[i, k], b[k, j]))
            out[i][j] = acc
    return Matrix(f, out, cols=b.cols)


def oracle_echelon_nonzero_rows(mat: Matrix) -> int:
    """Independent row-echelon oracle: eliminate without normalizing pivots,
    picking the LAST nonzero entry in each column, then count nonzero rows."""
    f = mat.field
    rows = mat.to_rows()
    r = 0
    for c in range(mat.cols):
        piv = None
        for i in range(len(rows) - 1, r - 1, -1):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv_p = f.inv(rows[r][c])
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                factor = f.mul(rows[i][c], inv_p)
                rows[i] = [f.sub(v, f.mul(factor, pv)) for v, pv in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return sum(1 for row in rows if any(row))


def test_matmul_identity(small_field):
    rng = make_rng(1)
    m = random_matrix(small_field, 4, 6, rng)
    assert matmul(Matrix.identity(small_field, 4), m) == m


def test_matmul_annihilator(small_field):
    m = random_matrix(small_field, 3, 4, make_rng(2))
    z = Matrix.zeros(small_field, 4, 5)
    assert matmul(m, z).is_zero()


def test_matmul_against_triple_loop_oracle(small_field):
    rng = make_rng(3)
    a = random_matrix(small_field, 5, 7, rng)
    b = random_matrix(small_field, 7, 3, rng)
    assert matmul(a, b) == brute_matmul(a, b)


def test_matmul_shape_mismatch(small_field):
    a = Matrix.zeros(small_field, 2, 3)
    with pytest.raises(ValueError, match="shape"):
        matmul(a, a)


def test_matmul_field_mismatch(small_field, tiny_field):
    with pytest.raises(FieldMismatchError):
        matmul(Matrix.zeros(small_field, 2, 2), Matrix.zeros(tiny_field, 2, 2))


def test_rank_identity_and_zero(small_field):
    assert rank(Matrix.identity(small_field, 6)) == 6
    assert rank(Matrix.zeros(small_field, 4, 7)) == 0


def test_rank_against_echelon_oracle(tiny_field):
    rng = make_rng(4)
    for trial in range(200):
        n = 2 + trial % 5
        m = random_matrix(tiny_field, n, n, rng)
        assert rank(m) == oracle_echelon_nonzero_rows(m)


def test_rank_equals_rank_of_transpose(small_field):
    rng = make_rng(5)
    for _ in range(50):
        m = random_matrix(small_field, 4, 6, rng)
        assert rank(m) == rank(m.transpose())


def test_left_null_space_of_identity_is_empty(small_field):
    b = left_null_space(Matrix.identity(small_field, 5))
    assert b.shape == (0, 5)


def test_left_null_space_of_zero_matrix_is_identity(small_field):
    b = left_null_space(Matrix.zeros(small_field, 4, 3))
    assert b == Matrix.identity(small_field, 4)


def test_left_null_space_postconditions(small_field):
    rng = make_rng(6)
    m = random_matrix(small_field, 6, 3, rng)
    assert rank(m) == 3  # random tall matrix is full column rank whp
    b = left_null_space(m)
    assert b.shape == (3, 6)
    assert matmul(b, m).is_zero()
    assert rank(b) == 3


def test_left_null_space_dimension_law(small_field):
    rng = make_rng(7)
    for _ in range(50):
        r, c = 2 + int(rng.integers(0, 6)), 2 + int(rng.integers(0, 6))
        m = random_matrix(small_field, r, c, rng)
        b = left_null_space(m)
        assert b.rows + rank(m) == m.rows
        assert matmul(b, m).is_zero()


def test_invert_identity(small_field):
    i5 = Matrix.identity(small_field, 5)
    assert invert(i5) == i5


def test_invert_small_diagonal(tiny_field):
    d = Matrix(tiny_field, [[2, 0], [0, 3]])
    assert invert(d) == Matrix(tiny_field, [[4, 0], [0, 5]])


def test_invert_multiply_back(small_field):
    rng = make_rng(8)
    m = random_matrix(small_field, 8, 8, rng)
    mi = invert(m)
    i8 = Matrix.identity(small_field, 8)
    assert matmul(m, mi) == i8
    assert matmul(mi, m) == i8


def test_invert_singular_reports_rank(small_field):
    m = Matrix(small_field, [[1, 2], [2, 4]])
    with pytest.raises(SingularMatrixError) as err:
        invert(m)
    assert err.value.rank == 1


def test_solve_identity(small_field):
    b = random_matrix(small_field, 4, 2, make_rng(9))
    assert solve(Matrix.identity(small_field, 4), b) == b


def test_solve_small_diagonal(tiny_field):
    a = Matrix(tiny_field, [[2, 0], [0, 5]])
    b = Matrix(tiny_field, [[1], [1]])
    assert solve(a, b) == Matrix(tiny_field, [[4], [3]])


def test_solve_residual_is_zero(small_field):
    rng = make_rng(10)
    a = random_matrix(small_field, 6, 6, rng)
    b = random_matrix(small_field, 6, 3, rng)
    x = solve(a, b)
    f = small_field
    residual = [
        [f.sub(matmul(a, x)[i, j], b[i, j]) for j in range(3)] for i in range(6)
    ]
    assert all(v == 0 for row in residual for v in row)


def test_solve_singular_raises(small_field):
    a = Matrix(small_field, [[1, 1], [1, 1]])
    with pytest.raises(SingularMatrixError):
        solve(a, Matrix.identity(small_field, 2))


def test_random_matrix_deterministic_replay(small_field):
    assert random_matrix(small_field, 3, 4, make_rng(11)) == random_matrix(
        small_field, 3, 4, make_rng(11)
    )
    assert random_matrix(small_field, 3, 4, make_rng(11)) != random_matrix(
        small_field, 3, 4, make_rng(12)
    )


def test_rref_idempotent_and_pivot_count(small_field):
    m = random_matrix(small_field, 4, 6, make_rng(13))
    r1, piv = rref(m)
    r2, piv2 = rref(r1)
    assert r1 == r2 and piv == piv2
    assert len(piv) == rank(m)


def all_square_submatrices_nonsingular(m: Matrix, max_size: int | None = None) -> bool:
    from itertools import combinations

    top = min(m.rows, m.cols) if max_size is None else max_size
    for size in range(1, top + 1):
        for rows_idx in combinations(range(m.rows), size):
            for cols_idx in combinations(range(m.cols), size):
                sub = m.take_rows(rows_idx).take_columns(cols_idx)
                if rank(sub) != size:
                    return False
    return True


def test_cauchy_1x1_is_nonzero(small_field):
    m = cauchy_mds(small_field, 1, 1, make_rng(14))
    assert m[0, 0] != 0


def test_cauchy_3x3_all_minors_nonsingular(small_field):
    m = cauchy_mds(small_field, 3, 3, make_rng(15))
    assert all_square_submatrices_nonsingular(m)


def test_cauchy_4x6_random_square_submatrices(small_field):
    from itertools import combinations

    m = cauchy_mds(small_field, 4, 6, make_rng(16))
    rng = make_rng(17)
    row_choices = list(combinations(range(4), 2)) + list(combinations(range(4), 3))
    for _ in range(50):
        rows_idx = row_choices[int(rng.integers(0, len(row_choices)))]
        size = len(rows_idx)
        cols_all = list(combinations(range(6), size))
        cols_idx = cols_all[int(rng.integers(0, len(cols_all)))]
        sub = m.take_rows(rows_idx).take_columns(cols_idx)
        assert rank(sub) == size


def test_cauchy_exhaustive_up_to_4x4(small_field):
    m = cauchy_mds(small_field, 4, 4, make_rng(18))
    assert all_square_submatrices_nonsingular(m)


def test_cauchy_field_too_small():
    f = __import__("lscomp").FieldSpec(7, allow_small=True)
    with pytest.raises(ValueError, match="too small"):
        cauchy_mds(f, 4, 4, make_rng(19))


def test_stacking_helpers(small_field):
    a = Matrix(small_field, [[1, 2]])
    b = Matrix(small_field, [[3, 4]])
    assert vstack(a, b) == Matrix(small_field, [[1, 2], [3, 4]])
    assert hstack(a, b) == Matrix(small_field, [[1, 2, 3, 4]])
    bd = block_diag(Matrix.identity(small_field, 2), Matrix(small_field, [[5]]))
    assert bd == Matrix(small_field, [[1, 0, 0], [0, 1, 0], [0, 0, 5]])


def test_json_rows_are_decimal_strings(default_field):
    big = default_field.modulus - 1
    m = Matrix(default_field, [[big, 1]])
    assert m.to_json_rows() == [[str(big), "1"]]
