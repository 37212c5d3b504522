"""Exact integer and rational linear algebra.

Vectors are tuples, matrices are sequences of row tuples.  Entries are
``int`` or :class:`fractions.Fraction`; nothing here ever touches a float.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd, lcm
from typing import Sequence

Vector = tuple
Matrix = Sequence[Sequence]


class LinalgError(ValueError):
    pass


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"refusing non-exact value {x!r}")


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def is_zero(v) -> bool:
    return all(x == 0 for x in v)


def vec_gcd(v) -> int:
    return reduce(gcd, (abs(int(x)) for x in v), 0)


def primitive(v) -> Vector:
    """Shortest lattice vector on the ray through ``v``.

    Rational input is first cleared of denominators.
    """
    v = tuple(v)
    if is_zero(v):
        raise LinalgError("zero has no primitive representative")
    ints = _integer_row(v)
    g = vec_gcd(ints)
    return tuple(x // g for x in ints)


def scale_to_integer(v) -> Vector:
    """Clear denominators without dividing by the content (zero allowed)."""
    den = reduce(lcm, (Fraction(x).denominator for x in v), 1)
    return tuple(int(Fraction(x) * den) for x in v)


def _integer_row(row) -> list[int]:
    """Scale a row of exact values to integers."""
    if all(type(x) is int for x in row):
        return list(row)
    fr = [to_fraction(x) for x in row]
    den = reduce(lcm, (x.denominator for x in fr), 1)
    return [x.numerator * (den // x.denominator) for x in fr]


def _reduce_row(row: list[int]) -> list[int]:
    g = reduce(gcd, row, 0)
    return [x // g for x in row] if g > 1 else row


def echelon(rows: Matrix, ncols: int | None = None):
    """Fraction-free reduced echelon form: ``(integer rows, pivots)``.

    Each returned row is primitive, zero in the other pivot columns and
    nonzero in its own pivot column.
    """
    M = [_integer_row(row) for row in rows]
    if ncols is None:
        ncols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        a = M[r][c]
        for i in range(len(M)):
            b = M[i][c]
            if i != r and b != 0:
                M[i] = _reduce_row([a * x - b * y for x, y in zip(M[i], M[r])])
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rref(rows: Matrix, ncols: int | None = None):
    """Reduced row echelon form over Q.

    Returns ``(R, pivots)`` where ``R`` holds only the nonzero rows.
    """
    M, pivots = echelon(rows, ncols)
    R = [tuple(Fraction(x, row[c]) for x in row) for row, c in zip(M, pivots)]
    return R, pivots


def rank(rows: Matrix, ncols: int | None = None) -> int:
    rows = list(rows)
    if not rows:
        return 0
    return len(echelon(rows, ncols)[1])


def kernel(rows: Matrix, ncols: int) -> list[Vector]:
    """Basis of ``{x : A x = 0}`` over Q, one vector per free column."""
    rows = list(rows)
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    R, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(R, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def integer_kernel_rational(rows: Matrix, ncols: int) -> list[Vector]:
    """Kernel basis over Q, each vector scaled to a primitive integer vector.

    Same vectors as ``kernel`` up to positive scaling, computed without
    leaving the integers.
    """
    rows = list(rows)
    if not rows:
        return [tuple(int(i == j) for i in range(ncols)) for j in range(ncols)]
    M, pivots = echelon(rows, ncols)
    L = reduce(lcm, (abs(row[p]) for row, p in zip(M, pivots)), 1)
    basis = []
    for f in (c for c in range(ncols) if c not in pivots):
        x = [0] * ncols
        x[f] = L
        for row, p in zip(M, pivots):
            x[p] = -row[f] * (L // row[p])
        g = vec_gcd(x)
        basis.append(tuple(y // g for y in x))
    return basis


def solve_affine(A: Matrix, b) -> tuple[Vector, list[Vector]] | None:
    """Solve ``A x = b`` exactly.

    Returns ``(particular, kernel_basis)`` or ``None`` when the system is
    inconsistent.  ``A`` may be empty only when ``b`` is.
    """
    A = [tuple(row) for row in A]
    b = [to_fraction(x) for x in b]
    if len(A) != len(b):
        raise LinalgError("row count of A does not match b")
    if not A:
        raise LinalgError("empty system has no column count")
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(R, pivots):
        x[p] = row[n]
    return tuple(x), kernel(A, n)


def solve_unique(A: Matrix, b) -> Vector | None:
    sol = solve_affine(A, b)
    if sol is None:
        return None
    x, ker = sol
    if ker:
        raise LinalgError("system is underdetermined")
    return x


def bareiss_det(M: Matrix) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def det(M: Matrix):
    """Determinant over Q (integer input goes through Bareiss)."""
    if all(isinstance(x, int) for row in M for x in row):
        return bareiss_det(M)
    den = reduce(lcm, (Fraction(x).denominator for row in M for x in row), 1)
    scaled = [[int(Fraction(x) * den) for x in row] for row in M]
    return Fraction(bareiss_det(scaled), den ** len(M))


def maximal_minors_gcd(vectors: Sequence[Vector]) -> int:
    """gcd of all k x k minors of the k x n matrix with the given rows."""
    k = len(vectors)
    if k == 0:
        return 1
    n = len(vectors[0])
    g = 0
    for cols in combinations(range(n), k):
        g = gcd(g, abs(bareiss_det([[v[c] for c in cols] for v in vectors])))
    return g


def _column_hnf_kernel(rows: list[list[int]], ncols: int) -> list[Vector]:
    """Z-basis of the integer kernel via unimodular column operations."""
    A = [list(r) for r in rows]
    U = [[int(i == j) for j in range(ncols)] for i in range(ncols)]  # columns of U

    def colop_swap(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        U[i], U[j] = U[j], U[i]

    def colop_addmul(dst, src, q):
        # column dst -= q * column src
        for r in A:
            r[dst] -= q * r[src]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    piv_col = 0
    for r in range(len(A)):
        if piv_col >= ncols:
            break
        while True:
            nz = [c for c in range(piv_col, ncols) if A[r][c] != 0]
            if not nz:
                break
            c_min = min(nz, key=lambda c: abs(A[r][c]))
            if c_min != piv_col:
                colop_swap(piv_col, c_min)
            done = True
            for c in range(piv_col + 1, ncols):
                if A[r][c] != 0:
                    colop_addmul(c, piv_col, A[r][c] // A[r][piv_col])
                    if A[r][c] != 0:
                        done = False
            if done:
                break
        if any(A[r][c] != 0 for c in range(piv_col, ncols)):
            piv_col += 1
    return [tuple(U[c]) for c in range(piv_col, ncols)]


def integer_kernel(rows: Matrix, ncols: int) -> list[Vector]:
    """Lattice basis of ``{x in Z^n : A x = 0}`` (rational A is scaled)."""
    ints = [list(scale_to_integer(r)) for r in rows]
    return _column_hnf_kernel(ints, ncols)


def saturation_index(vectors: Sequence[Vector]) -> tuple[int, list[Vector]]:
    """Index of the lattice spanned by ``vectors`` in its saturation.

    Returns ``(index, basis)`` where ``basis`` is a lattice basis of
    ``span_Q(vectors) ∩ Z^n``.
    """
    vectors = [tuple(int(x) for x in v) for v in vectors]
    if not vectors:
        return 1, []
    n = len(vectors[0])
    if rank(vectors, n) != len(vectors):
        raise LinalgError("vectors are linearly dependent")
    complement = integer_kernel_rational(vectors, n)
    if complement:
        basis = integer_kernel(complement, n)
    else:
        basis = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    # Coordinates of the generators in the saturated basis.
    coords = []
    cols = list(zip(*basis))
    for v in vectors:
        x = solve_unique(cols, v)
        coords.append([int(c) for c in x])
    index = abs(bareiss_det(coords))
    return index, basis


def matmul_vec(A: Matrix, x) -> Vector:
    return tuple(dot(row, x) for row in A)


def transpose(A: Matrix) -> list[Vector]:
    return [tuple(col) for col in zip(*A)]


def fmt_q(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_vec(v) -> str:
    return "(" + ",".join(fmt_q(x) for x in v) + ")"
