"""
Exact linear algebra over the rationals.

Matrices are lists of rows of ``Fraction``. Nothing here touches floating point,
so ranks, kernels and inverses are exact.
"""
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from affine_compact.errors import SchemaError

Matrix = list[list[Fraction]]


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings. Floats are refused: they are never exact."""
    if isinstance(value, bool):
        raise SchemaError(f"Boolean is not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise SchemaError(f"Malformed rational {value!r}", value=value) from e
    raise SchemaError(f"Expected an integer or a 'p/q' string, got {value!r}", value=repr(value))


def fraction_to_json(value: Fraction):
    return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[to_fraction(v) for v in row] for row in rows]


def row_echelon(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form. Returns the reduced matrix and its pivot columns."""
    m = as_matrix(rows)
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    piv_r = 0
    for piv_c in range(n_cols):
        if piv_r == n_rows:
            break
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c] != 0:
                break
        else:
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
        fp = m[piv_r][piv_c]
        m[piv_r] = [v / fp for v in m[piv_r]]
        for r in range(n_rows):
            if r == piv_r:
                continue
            fr = m[r][piv_c]
            if fr == 0:
                continue
            m[r] = [a - fr * b for a, b in zip(m[r], m[piv_r])]
        pivots.append(piv_c)
        piv_r += 1
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(row_echelon(rows)[1])


def nullspace(rows: Sequence[Sequence], n_cols: int | None = None) -> Matrix:
    """Basis of {v : rows · v = 0}, one basis vector per free column."""
    if not rows:
        if n_cols is None:
            raise ValueError("n_cols is required for an empty system")
        return [[Fraction(int(i == j)) for j in range(n_cols)] for i in range(n_cols)]
    reduced, pivots = row_echelon(rows)
    n_cols = len(reduced[0])
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -reduced[r][f]
        basis.append(v)
    return basis


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    m = as_matrix(matrix)
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def inverse(matrix: Sequence[Sequence]) -> Matrix:
    m = as_matrix(matrix)
    n = len(m)
    augmented = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    reduced, pivots = row_echelon(augmented)
    if pivots[:n] != list(range(n)):
        raise ValueError("Matrix is singular")
    return [row[n:] for row in reduced]


def mat_vec(matrix: Sequence[Sequence[Fraction]], vector: Sequence) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, vector)), Fraction(0)) for row in matrix]


def mat_mul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull of ``points`` (nonempty)."""
    base = points[0]
    diffs = [[to_fraction(p) - to_fraction(b) for p, b in zip(pt, base)] for pt in points[1:]]
    diffs = [d for d in diffs if any(d)]
    return rank(diffs)
