"""Exact linear algebra over rationals: Bareiss elimination, nullspace, solve.

Rows are scaled to coprime integers up front and elimination is fraction-free
(one-step Bareiss), so intermediate entries stay at minor-determinant size
instead of blowing up the way naive cross-multiplication does.  Determining
systems with a few hundred rows stay comfortably fast this way.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

__all__ = ["ExactMatrix", "nullspace", "rank", "solve"]


class ExactMatrix:
    """Rectangular matrix of Fractions."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = [[Fraction(v) for v in row] for row in rows]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
        self.rows = rows

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def mulvec(self, v):
        return [sum(a * b for a, b in zip(row, v)) for row in self.rows]

    def __repr__(self):
        return f"ExactMatrix({self.nrows}x{self.ncols})"


def _int_rows(rows):
    out = []
    for row in rows:
        den = 1
        for v in row:
            den = den * v.denominator // gcd(den, v.denominator)
        ints = [int(v * den) for v in row]
        g = 0
        for v in ints:
            g = gcd(g, v)
        if g > 1:
            ints = [v // g for v in ints]
        out.append(ints)
    return out


def _bareiss_echelon(rows):
    """In-place fraction-free echelon form; returns pivot (row, col) list."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        pr = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pr is None:
            continue
        if pr != r:
            rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            fi = rows[i][c]
            row_i = rows[i]
            row_r = rows[r]
            for j in range(c, ncols):
                row_i[j] = (piv * row_i[j] - fi * row_r[j]) // prev
        pivots.append((r, c))
        prev = piv
        r += 1
    return pivots


def _normalize_vector(vec):
    den = 1
    for v in vec:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    lead = next((v for v in ints if v != 0), 0)
    if lead < 0:
        ints = [-v for v in ints]
    return [Fraction(v) for v in ints]


def nullspace(matrix):
    """Exact basis of the right nullspace.

    Basis vectors are integer-cleared with content 1 and first nonzero entry
    positive, ordered by their free column.  An m x 0 matrix has an empty
    basis; a 0 x n matrix has the standard basis.
    """
    if isinstance(matrix, ExactMatrix):
        rows = matrix.rows
        ncols = matrix.ncols
    else:
        rows = [[Fraction(v) for v in row] for row in matrix]
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [
            [Fraction(1) if i == j else Fraction(0) for i in range(ncols)]
            for j in range(ncols)
        ]
    work = _int_rows(rows)
    pivots = _bareiss_echelon(work)
    pivot_cols = [c for _, c in pivots]
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for f in free_cols:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, c in reversed(pivots):
            if c > f:
                continue
            s = sum(Fraction(work[r][j]) * vec[j] for j in range(c + 1, ncols))
            vec[c] = -s / work[r][c]
        basis.append(_normalize_vector(vec))
    return basis


def rank(matrix) -> int:
    rows = matrix.rows if isinstance(matrix, ExactMatrix) else matrix
    if not rows:
        return 0
    work = _int_rows([[Fraction(v) for v in row] for row in rows])
    return len(_bareiss_echelon(work))


def solve(matrix, rhs):
    """One exact solution of A v = rhs, or None when inconsistent.

    Free variables (if any) are set to zero.
    """
    rows = matrix.rows if isinstance(matrix, ExactMatrix) else matrix
    ncols = len(rows[0]) if rows else 0
    aug = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    if not aug:
        return [Fraction(0)] * ncols
    work = _int_rows(aug)
    pivots = _bareiss_echelon(work)
    if any(c == ncols for _, c in pivots):
        return None
    vec = [Fraction(0)] * ncols
    for r, c in reversed(pivots):
        s = sum(Fraction(work[r][j]) * vec[j] for j in range(c + 1, ncols))
        vec[c] = (Fraction(work[r][ncols]) - s) / work[r][c]
    return vec
