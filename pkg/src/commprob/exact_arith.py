"""Integer and rational helpers: factorization, square-freeness, Smith normal form.

Every probability in the package is a :class:`fractions.Fraction`, which is
always kept in lowest terms with a positive denominator.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

import sympy

Factorization = list[tuple[int, int]]

# Search grids never produce integers beyond this.
FACTOR_CAP = 1 << 128


def factorize(n: int) -> Factorization:
    """Return ``[(prime, exponent), ...]`` with strictly increasing primes.

    >>> factorize(60)
    [(2, 2), (3, 1), (5, 1)]
    >>> factorize(1)
    []
    """
    if n < 1:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    if n >= FACTOR_CAP:
        raise ValueError("integer exceeds the configured factorization cap")
    return sorted(sympy.factorint(n).items())


def is_square_free(n: int) -> bool:
    """True iff no prime divides ``n`` twice.  ``is_square_free(1)`` is True."""
    return all(e == 1 for _, e in factorize(n))


def reduce(num: int, den: int) -> Fraction:
    """``num/den`` in lowest terms with positive denominator."""
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    return Fraction(num, den)


def prime_support(n: int) -> set[int]:
    return {p for p, _ in factorize(n)}


def snf_diagonal(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Diagonal of the Smith normal form of an integer matrix.

    The result has ``min(rows, cols)`` entries, each nonnegative and dividing
    the next, with zeros last.

    >>> snf_diagonal([[2, 0], [0, 3]])
    [1, 6]
    >>> snf_diagonal([[2, 4], [6, 8]])
    [2, 4]
    """
    a = [list(map(int, row)) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if any(len(row) != cols for row in a):
        raise ValueError("ragged matrix")
    diag: list[int] = []
    for s in range(min(rows, cols)):
        while True:
            pivot = _find_pivot(a, s, rows, cols)
            if pivot is None:
                return diag + [0] * (min(rows, cols) - s)
            i, j = pivot
            a[s], a[i] = a[i], a[s]
            for row in a:
                row[s], row[j] = row[j], row[s]
            p = a[s][s]
            for i in range(s + 1, rows):
                q = a[i][s] // p
                if q:
                    for c in range(s, cols):
                        a[i][c] -= q * a[s][c]
            for j in range(s + 1, cols):
                q = a[s][j] // p
                if q:
                    for r in range(s, rows):
                        a[r][j] -= q * a[r][s]
            if any(a[i][s] for i in range(s + 1, rows)) or any(a[s][j] for j in range(s + 1, cols)):
                continue
            # divisibility: fold an offending row into the pivot row and retry
            bad = next((i for i in range(s + 1, rows)
                        if any(a[i][j] % p for j in range(s + 1, cols))), None)
            if bad is None:
                break
            for c in range(s, cols):
                a[s][c] += a[bad][c]
        diag.append(abs(a[s][s]))
    return diag


def _find_pivot(a: list[list[int]], s: int, rows: int, cols: int):
    best = None
    for i in range(s, rows):
        for j in range(s, cols):
            v = abs(a[i][j])
            if v and (best is None or v < best[0]):
                best = (v, i, j)
                if v == 1:
                    return i, j
    return None if best is None else (best[1], best[2])


def lattice_index(matrix: Sequence[Sequence[int]]) -> int:
    """Index of the column lattice of a full-rank ``r x c`` matrix in ``Z^r``.

    Zero if the columns do not span a full-rank sublattice.
    """
    d = snf_diagonal(matrix)
    if len(d) < len(matrix) or 0 in d:
        return 0
    out = 1
    for x in d:
        out *= x
    return out


def determinantal_divisor(matrix: Sequence[Sequence[int]], size: int) -> int:
    """gcd of all ``size x size`` minors (brute force, small matrices only)."""
    from itertools import combinations

    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    g = 0
    for rs in combinations(range(rows), size):
        for cs in combinations(range(cols), size):
            sub = sympy.Matrix([[matrix[r][c] for c in cs] for r in rs])
            g = gcd(g, int(sub.det()))
    return g
