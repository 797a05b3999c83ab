"""Dense exact linear algebra over a prime field.

Gaussian elimination with first-nonzero pivoting throughout: pivot order is
deterministic, so ranks, echelon forms, null-space bases and inverses are
bit-reproducible across runs and platforms. Matrices are immutable after
construction; elimination always works on private copies.

Scale target is desk-size instances (a few hundred rows), so storage is plain
row-major Python ints and products are accumulated exactly before a single
final reduction.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .prime_field import FieldMismatchError, FieldSpec


class SingularMatrixError(ValueError):
    """Inversion/solve hit a singular matrix; carries the rank found."""

    def __init__(self, message: str, rank: int):
        super().__init__(f"{message} (rank {rank})")
        self.rank = rank


class Matrix:
    """Immutable rows x cols matrix with canonical entries in a shared field."""

    __slots__ = ("field", "rows", "cols", "_d")

    def __init__(self, field: FieldSpec, data: Sequence[Sequence[int]], cols: int | None = None):
        self.field = field
        rows = [list(r) for r in data]
        if rows:
            width = len(rows[0])
        else:
            width = cols if cols is not None else 0
        m = field.modulus
        for r in rows:
            if len(r) != width:
                raise ValueError("ragged rows in matrix data")
            for j, v in enumerate(r):
                if not 0 <= v < m:
                    r[j] = v % m
        self.rows = len(rows)
        self.cols = width
        self._d = rows

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, [[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._d[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return tuple(self._d[i])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._d)

    def to_rows(self) -> list[list[int]]:
        return [list(r) for r in self._d]

    def to_json_rows(self) -> list[list[str]]:
        """Array-of-arrays of decimal strings (values can exceed 2^53)."""
        return [[str(v) for v in r] for r in self._d]

    def transpose(self) -> "Matrix":
        return Matrix(self.field, [list(c) for c in zip(*self._d)] if self.rows and self.cols
                      else [[] for _ in range(self.cols)], cols=self.rows)

    def take_rows(self, idx: Iterable[int]) -> "Matrix":
        return Matrix(self.field, [self._d[i] for i in idx], cols=self.cols)

    def take_columns(self, idx: Iterable[int]) -> "Matrix":
        idx = list(idx)
        return Matrix(self.field, [[r[j] for j in idx] for r in self._d], cols=len(idx))

    def is_zero(self) -> bool:
        return all(v == 0 for r in self._d for v in r)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.shape == other.shape
            and self._d == other._d
        )

    def __hash__(self):
        return hash((self.field, self.rows, self.cols, tuple(tuple(r) for r in self._d)))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return matmul(self, other)

    def __neg__(self) -> "Matrix":
        neg = self.field.neg
        return Matrix(self.field, [[neg(v) for v in r] for r in self._d], cols=self.cols)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols} mod {self.field.modulus})"


def _check_same_field(a: Matrix, b: Matrix):
    if a.field != b.field:
        raise FieldMismatchError("matrices live in different fields")


def matmul(lhs: Matrix, rhs: Matrix) -> Matrix:
    _check_same_field(lhs, rhs)
    if lhs.cols != rhs.rows:
        raise ValueError(f"shape mismatch: {lhs.shape} @ {rhs.shape}")
    m = lhs.field.modulus
    rt = list(zip(*rhs._d)) if rhs.rows else [() for _ in range(rhs.cols)]
    out = []
    for lrow in lhs._d:
        # exact integer accumulation, one reduction per entry
        out.append([sum(a * b for a, b in zip(lrow, col)) % m for col in rt])
    return Matrix(lhs.field, out, cols=rhs.cols)


def vstack(*mats: Matrix) -> Matrix:
    first = mats[0]
    for mt in mats[1:]:
        _check_same_field(first, mt)
        if mt.cols != first.cols:
            raise ValueError("column count mismatch in vstack")
    rows = [r for mt in mats for r in mt._d]
    return Matrix(first.field, rows, cols=first.cols)


def hstack(*mats: Matrix) -> Matrix:
    first = mats[0]
    for mt in mats[1:]:
        _check_same_field(first, mt)
        if mt.rows != first.rows:
            raise ValueError("row count mismatch in hstack")
    rows = [sum((mt._d[i] for mt in mats), []) for i in range(first.rows)]
    return Matrix(first.field, rows, cols=sum(mt.cols for mt in mats))


def block_diag(*mats: Matrix) -> Matrix:
    field = mats[0].field
    total_r = sum(mt.rows for mt in mats)
    total_c = sum(mt.cols for mt in mats)
    out = [[0] * total_c for _ in range(total_r)]
    r0 = c0 = 0
    for mt in mats:
        _check_same_field(mats[0], mt)
        for i, row in enumerate(mt._d):
            out[r0 + i][c0:c0 + mt.cols] = row
        r0 += mt.rows
        c0 += mt.cols
    return Matrix(field, out, cols=total_c)


def _rref(field: FieldSpec, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """In-place reduced row echelon form; returns (rows, pivot column list).

    First nonzero entry in the current column is the pivot (no magnitude
    concerns in an exact field); fully reduced above and below.
    """
    m = field.modulus
    inv = field.inv
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = inv(rows[r][c])
        if pv != 1:
            rows[r] = [v * pv % m for v in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(v - f * pvv) % m for v, pvv in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rref(mat: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    rows, pivots = _rref(mat.field, mat.to_rows(), mat.cols)
    return Matrix(mat.field, rows, cols=mat.cols), tuple(pivots)


def rank(mat: Matrix) -> int:
    _, pivots = _rref(mat.field, mat.to_rows(), mat.cols)
    return len(pivots)


def left_null_space(mat: Matrix) -> Matrix:
    """Canonical basis B (rows) of {x : x.M = 0}, so B.M = 0.

    Derived from the RREF of the transpose problem with free variables taken
    in ascending index order; rank(B) = rows(M) - rank(M) by construction.
    """
    field = mat.field
    n = mat.rows
    t_rows = [list(c) for c in zip(*mat._d)] if mat.rows and mat.cols else []
    red, pivots = _rref(field, t_rows, n)
    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    basis = []
    neg = field.neg
    for f in free:
        vec = [0] * n
        vec[f] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = neg(red[i][f])
        basis.append(vec)
    return Matrix(field, basis, cols=n)


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Exact solution X of A.X = B for square nonsingular A."""
    _check_same_field(a, b)
    if a.rows != a.cols:
        raise ValueError("solve requires a square matrix")
    if b.rows != a.rows:
        raise ValueError("right-hand side row count mismatch")
    aug = [ra + rb for ra, rb in zip(a.to_rows(), b.to_rows())]
    red, pivots = _rref(a.field, aug, a.cols)
    if len(pivots) < a.cols:
        raise SingularMatrixError("singular system", rank=len(pivots))
    return Matrix(a.field, [r[a.cols:] for r in red], cols=b.cols)


def invert(mat: Matrix) -> Matrix:
    if mat.rows != mat.cols:
        raise ValueError("only square matrices can be inverted")
    try:
        return solve(mat, Matrix.identity(mat.field, mat.rows))
    except SingularMatrixError as exc:
        raise SingularMatrixError("singular matrix", rank=exc.rank) from None


def random_matrix(field: FieldSpec, rows: int, cols: int, rng: np.random.Generator) -> Matrix:
    """Entries drawn i.i.d. uniform from the field, row-major draw order."""
    flat = field.sample_many(rng, rows * cols) if rows * cols else []
    return Matrix(field, [flat[i * cols:(i + 1) * cols] for i in range(rows)], cols=cols)


def cauchy_mds(field: FieldSpec, rows: int, cols: int, rng: np.random.Generator) -> Matrix:
    """Cauchy matrix 1/(x_i - y_j) on distinct nodes: every square submatrix
    of any size is nonsingular, which is the MDS property the certificate
    construction needs unconditionally (a Vandermonde matrix would not give
    that over a prime field)."""
    need = rows + cols
    if field.modulus <= need:
        raise ValueError(f"field size {field.modulus} too small for {rows}x{cols} Cauchy matrix")
    nodes: list[int] = []
    seen = set()
    while len(nodes) < need:
        v = field.sample(rng)
        if v not in seen:
            seen.add(v)
            nodes.append(v)
    xs, ys = nodes[:rows], nodes[rows:]
    inv = field.inv
    sub = field.sub
    return Matrix(field, [[inv(sub(x, y)) for y in ys] for x in xs], cols=cols)
