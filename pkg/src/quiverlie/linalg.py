"""Small exact linear algebra over the rationals.

Matrices are lists of rows of Fractions.  Everything here is Gaussian
elimination with exact pivoting; sizes in this package stay tiny (graded
pieces of necklace spaces, representation dimensions up to a handful), so
clarity beats asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import ShapeMismatchError, SingularMatrixError

Matrix = list[list[Fraction]]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def zeros(n: int, m: int) -> Matrix:
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def shape(a: Matrix) -> tuple[int, int]:
    return (len(a), len(a[0]) if a else 0)


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ShapeMismatchError(f"cannot add shapes {shape(a)} and {shape(b)}")
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ShapeMismatchError(f"cannot subtract shapes {shape(a)} and {shape(b)}")
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, c) -> Matrix:
    c = Fraction(c)
    return [[x * c for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k = shape(a)
    k2, m = shape(b)
    if k != k2:
        raise ShapeMismatchError(f"cannot multiply shapes {(n, k)} and {(k2, m)}")
    out = zeros(n, m)
    for i in range(n):
        row = a[i]
        for j in range(m):
            out[i][j] = sum((row[t] * b[t][j] for t in range(k)), Fraction(0))
    return out


def transpose(a: Matrix) -> Matrix:
    n, m = shape(a)
    return [[a[i][j] for i in range(n)] for j in range(m)]


def trace(a: Matrix) -> Fraction:
    n, m = shape(a)
    if n != m:
        raise ShapeMismatchError("trace of a non-square matrix")
    return sum((a[i][i] for i in range(n)), Fraction(0))


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def _eliminate(a: Matrix) -> tuple[Matrix, list[int]]:
    """Row echelon form; returns (echelon matrix, pivot column list)."""
    m = [row[:] for row in a]
    n_rows, n_cols = shape(m)
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    _, pivots = _eliminate(a)
    return len(pivots)


def nullspace(a: Matrix) -> list[list[Fraction]]:
    """A basis (list of vectors) of the right kernel."""
    n_rows, n_cols = shape(a)
    if n_cols == 0:
        return []
    if n_rows == 0:
        return [row[:] for row in identity(n_cols)]
    red, pivots = _eliminate(a)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n_cols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def inverse(a: Matrix) -> Matrix:
    n, m = shape(a)
    if n != m:
        raise ShapeMismatchError("inverse of a non-square matrix")
    aug = [row[:] + ident_row[:] for row, ident_row in zip(a, identity(n))]
    red, pivots = _eliminate(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in red[:n]]


def solve(a: Matrix, b: list[Fraction]) -> list[Fraction]:
    """Solve a x = b for square invertible a."""
    inv = inverse(a)
    return [sum((inv[i][j] * b[j] for j in range(len(b))), Fraction(0)) for i in range(len(inv))]
