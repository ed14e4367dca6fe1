"""Small exact linear algebra over the rationals.

Matrices here are at most ~10x10, so plain Gaussian elimination on
``Fraction`` entries is fast enough and keeps everything exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = Sequence[Sequence[int | Fraction]]


def _to_frac(a: Matrix) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in a]


def det(a: Matrix) -> Fraction:
    m = _to_frac(a)
    n = len(m)
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            result = -result
        p = m[col][col]
        result *= p
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] / p
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return result


def solve(a: Matrix, b: Sequence[int | Fraction]) -> list[Fraction] | None:
    """Solve the square system ``a x = b``; ``None`` if ``a`` is singular."""
    n = len(a)
    m = [list(row) + [Fraction(rhs)] for row, rhs in zip(_to_frac(a), b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def rank(a: Matrix) -> int:
    m = _to_frac(a)
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for col in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(r + 1, rows):
            if m[i][col] != 0:
                factor = m[i][col] / m[r][col]
                m[i] = [x - factor * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == rows:
            break
    return r


def nullspace(a: Matrix, ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : a x = 0}`` via reduced row echelon form."""
    m = _to_frac(a)
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [x - factor * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][free]
        basis.append(v)
    return basis


def primitive(v: Sequence[int | Fraction]) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


def integer_inverse(a: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Inverse of a unimodular integer matrix."""
    n = len(a)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = solve(a, e)
        if x is None:
            raise ValueError("matrix is singular")
        cols.append(x)
    inv = []
    for i in range(n):
        row = []
        for j in range(n):
            x = cols[j][i]
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(x))
        inv.append(tuple(row))
    return tuple(inv)


def matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)
