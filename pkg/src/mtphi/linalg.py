"""Dense linear algebra over K with tracked precision.

Matrices are lists of rows of :class:`~mtphi.padic.Scalar`; vectors are
plain lists.  Elimination pivots on the entry of minimal valuation in the
current column (lowest row index on ties), which keeps outputs
deterministic.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Sequence

from .errors import InsufficientPrecision, NotInvertible
from .padic import LocalField, Scalar

Matrix = List[List[Scalar]]


def zeros(field: LocalField, rows: int, cols: int) -> Matrix:
    z = field.zero()
    return [[z] * cols for _ in range(rows)]


def identity(field: LocalField, n: int) -> Matrix:
    z, o = field.zero(), field.one()
    return [[o if i == j else z for j in range(n)] for i in range(n)]


def from_rationals(field: LocalField, rows) -> Matrix:
    return [[field(x) for x in row] for row in rows]


def shape(A: Sequence[Sequence]) -> tuple:
    return (len(A), len(A[0]) if A else 0)


def matmul(A: Sequence[Sequence], B: Sequence[Sequence], field: LocalField = None) -> Matrix:
    n, k = shape(A)
    k2, m = len(B), (len(B[0]) if B else 0)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} @ {k2}x{m}")
    if k == 0:
        if field is None:
            raise ValueError("empty product needs a field")
        return zeros(field, n, m)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for t in range(1, k):
                a, b = A[i][t], B[t][j]
                if a.is_zero() and a.prec + min(b._val_or_prec(), b.prec) >= acc.prec:
                    continue
                acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    return [_dot(row, v) for row in A]


def _dot(row, v):
    acc = row[0] * v[0]
    for a, x in zip(row[1:], v[1:]):
        acc = acc + a * x
    return acc


def transpose(A: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*A)] if A else []


def add(A, B) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def sub(A, B) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scale(A, s) -> Matrix:
    return [[s * a for a in row] for row in A]


def kron(A, B) -> Matrix:
    out = []
    for ra in A:
        for rb in B:
            out.append([a * b for a in ra for b in rb])
    return out


def columns(A) -> list:
    """Columns of A as vectors."""
    return [list(c) for c in zip(*A)] if A else []


def from_columns(cols: Sequence[Sequence], nrows: int, field: LocalField) -> Matrix:
    if not cols:
        return [[] for _ in range(nrows)]
    return [[c[i] for c in cols] for i in range(nrows)]


def block(A, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return [[A[i][j] for j in cols] for i in rows]


def is_zero_matrix(A) -> bool:
    return all(x.is_zero() for row in A for x in row)


def equal(A, B) -> bool:
    if shape(A) != shape(B):
        return False
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def min_precision(A) -> Fraction:
    return min((x.prec for row in A for x in row), default=None)


def _check_decidable(entries) -> None:
    for x in entries:
        if x.prec <= 0:
            raise InsufficientPrecision(
                "cannot decide whether an entry vanishes: precision exhausted"
            )


def _shift(x: Scalar, k: int) -> Scalar:
    """x * p^k, exact: precision moves by k instead of being capped by p^k's own."""
    pk = Fraction(x.field.p) ** k
    return Scalar(x.field, [c * pk for c in x.coeffs], x.prec + k)


def _normalize_row(row: list) -> list:
    # scaling a row by p^k leaves the echelon form unchanged; with minimal
    # valuation 0 the elimination multipliers stay integral and cost no digits
    vals = [x.valuation() for x in row if not x.is_zero()]
    if not vals:
        return row
    k = -math.floor(min(vals))
    return [_shift(x, k) for x in row] if k else row


def row_reduce(A: Sequence[Sequence]) -> tuple:
    """Reduced row echelon form and the list of pivot columns."""
    R, pivots, _ = _row_reduce(A)
    return R, pivots


def _row_reduce(A: Sequence[Sequence]) -> tuple:
    """As row_reduce, plus whether a skipped column was only zero below the cap."""
    R = [_normalize_row(list(r)) for r in A]
    shaky = False
    nrows, ncols = shape(R)
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        best, best_val = None, None
        for i in range(r, nrows):
            x = R[i][c]
            if x.is_zero():
                continue
            v = x.valuation()
            if best is None or v < best_val:
                best, best_val = i, v
        if best is None:
            _check_decidable(R[i][c] for i in range(r, nrows))
            shaky = shaky or any(R[i][c].prec < R[i][c].field.precision for i in range(r, nrows))
            continue
        R[r], R[best] = R[best], R[r]
        inv = R[r][c].inverse()
        R[r] = [x * inv for x in R[r]]
        for i in range(nrows):
            if i != r and not R[i][c].is_zero():
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots, shaky


def rank(A) -> int:
    if not A or not A[0]:
        return 0
    return len(row_reduce(A)[1])


def nullspace(A, ncols: int = None, field: LocalField = None) -> list:
    """Basis of {x : A x = 0}; free coordinate set to 1 in each vector."""
    if not A:
        if ncols is None or field is None:
            raise ValueError("empty system needs ncols and field")
        return [[field.one() if i == j else field.zero() for i in range(ncols)] for j in range(ncols)]
    R, pivots = row_reduce(A)
    n = len(R[0])
    fld = R[0][0].field if n else field
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [fld.zero() for _ in range(n)]
        v[f] = fld.one()
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f]
        basis.append(v)
    return basis


def pivot_columns(A) -> list:
    if not A or not A[0]:
        return []
    return row_reduce(A)[1]


def column_basis(cols: Sequence[Sequence], nrows: int) -> list:
    """A maximal independent subset of ``cols`` (earliest columns preferred)."""
    if not cols:
        return []
    M = [[c[i] for c in cols] for i in range(nrows)]
    return [list(cols[j]) for j in pivot_columns(M)]


def inverse(A) -> Matrix:
    n = len(A)
    if n == 0:
        return []
    fld = A[0][0].field
    I = identity(fld, n)
    aug = [list(r) + list(ir) for r, ir in zip(A, I)]
    R, pivots, shaky = _row_reduce(aug)
    if pivots[:n] != list(range(n)):
        if shaky:
            raise InsufficientPrecision("matrix is singular only below the precision cap")
        raise NotInvertible("matrix is singular to working precision")
    return [row[n:] for row in R]


def is_invertible(A) -> bool:
    n = len(A)
    if n == 0:
        return True
    if any(len(r) != n for r in A):
        return False
    _, pivots, shaky = _row_reduce(A)
    if len(pivots) < n and shaky:
        raise InsufficientPrecision("rank is undecided below the precision cap")
    return len(pivots) == n


def solve(A, b: Sequence) -> list:
    """Some x with A x = b; raises NotInvertible when inconsistent."""
    n, m = shape(A)
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    R, pivots = row_reduce(aug)
    if m in pivots:
        raise NotInvertible("inconsistent linear system")
    fld = b[0].field
    x = [fld.zero() for _ in range(m)]
    for i, pc in enumerate(pivots):
        x[pc] = R[i][m]
    return x


def unit_vector(field: LocalField, n: int, k: int) -> list:
    return [field.one() if i == k else field.zero() for i in range(n)]
