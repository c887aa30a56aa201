"""Small exact-rational matrix helpers (d is at most 8 here, so plain elimination is fine)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = tuple[tuple[Fraction, ...], ...]


def to_fraction(x) -> Fraction:
    """Exact value of x; a float is read as its shortest decimal repr (0.1 -> 1/10)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(float(x)))
    return Fraction(x)


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    m = tuple(tuple(to_fraction(v) for v in row) for row in rows)
    if not m or any(len(r) != len(m) for r in m):
        raise ValueError("expected a non-empty square matrix")
    return m


def identity(d: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence) -> tuple[Fraction, ...]:
    return tuple(sum((x * Fraction(y) for x, y in zip(row, v)), Fraction(0)) for row in a)


def det(a: Matrix) -> Fraction:
    n = len(a)
    m = [list(r) for r in a]
    out = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            out = -out
        out *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return out


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            raise ValueError("singular matrix")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(r[n:]) for r in m)


def common_denominator(a: Matrix) -> int:
    return lcm(*(x.denominator for row in a for x in row))


def integerize(a: Matrix) -> tuple[list[list[int]], int]:
    """Return (integer matrix, den) with a == int_matrix / den."""
    den = common_denominator(a)
    return [[int(x * den) for x in row] for row in a], den


def primitive_completion(c: Sequence[int]) -> list[list[int]]:
    """Unimodular U (columns) with c @ U = (1, 0, ..., 0); c must have gcd 1.

    Columns 2..d of U then span the kernel of c on Z^d.
    """
    d = len(c)
    c = [int(x) for x in c]
    g = 0
    for x in c:
        g = gcd(g, x)
    if g != 1:
        raise ValueError(f"functional {c} is not primitive (gcd {g})")
    u = [[int(i == j) for j in range(d)] for i in range(d)]
    row = list(c)

    def colop(dst: int, src: int, q: int) -> None:
        # column dst -= q * column src
        row[dst] -= q * row[src]
        for i in range(d):
            u[i][dst] -= q * u[i][src]

    while sum(1 for x in row if x) > 1:
        piv = min((j for j in range(d) if row[j]), key=lambda j: abs(row[j]))
        for j in range(d):
            if j != piv and row[j]:
                colop(j, piv, row[j] // row[piv])
    j = next(j for j in range(d) if row[j])
    if j != 0:
        row[0], row[j] = row[j], row[0]
        for i in range(d):
            u[i][0], u[i][j] = u[i][j], u[i][0]
    if row[0] < 0:
        row[0] = -row[0]
        for i in range(d):
            u[i][0] = -u[i][0]
    return u
