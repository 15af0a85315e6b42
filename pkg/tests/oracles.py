"""Independent reference computations used by the tests.

Nothing here imports the package's arithmetic: field elements are
polynomials in (s2, s3, i) reduced by s2^2 = 2, s3^2 = 3, i^2 = -1, and
linear algebra is plain Gaussian elimination over Fractions.
"""

from fractions import Fraction
from itertools import product

# basis element n <-> exponents (bit0 of s2, bit1 of s3, bit2 of i)
EXPONENTS = [(n & 1, n >> 1 & 1, n >> 2 & 1) for n in range(8)]


def poly_mul(x, y):
    """Multiply two coordinate 8-tuples by expanding monomials."""
    out = [Fraction(0)] * 8
    for m, n in product(range(8), repeat=2):
        if not x[m] or not y[n]:
            continue
        e = [a + b for a, b in zip(EXPONENTS[m], EXPONENTS[n])]
        c = x[m] * y[n]
        # reduce squares of the generators
        if e[0] == 2:
            c *= 2
            e[0] = 0
        if e[1] == 2:
            c *= 3
            e[1] = 0
        if e[2] == 2:
            c = -c
            e[2] = 0
        out[EXPONENTS.index(tuple(e))] += c
    return tuple(out)


def solve_square(A, b):
    """Solve A x = b for a nonsingular square Fraction matrix."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bv)] for row, bv in zip(A, b)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [M[r][n] for r in range(n)]


def inverse_coords(x):
    """Coordinates of 1/x from the 8x8 multiplication-by-x matrix."""
    cols = [poly_mul(x, tuple(Fraction(int(k == n)) for k in range(8))) for n in range(8)]
    A = [[cols[n][m] for n in range(8)] for m in range(8)]
    return tuple(solve_square(A, [1] + [0] * 7))


def dense_rank(rows):
    """Rank of a list of equal-length Fraction rows."""
    M = [[Fraction(v) for v in r] for r in rows]
    rank, col = 0, 0
    ncols = len(M[0]) if M else 0
    while rank < len(M) and col < ncols:
        p = next((r for r in range(rank, len(M)) if M[r][col] != 0), None)
        if p is None:
            col += 1
            continue
        M[rank], M[p] = M[p], M[rank]
        for r in range(len(M)):
            if r != rank and M[r][col] != 0:
                f = M[r][col] / M[rank][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[rank])]
        rank += 1
        col += 1
    return rank
