"""Exact rational linear algebra on tuples of Fractions.

Everything here works on short vectors (length <= 12), so plain Python
Gaussian elimination is fast enough and keeps results exact.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Vec = tuple  # tuple[Fraction, ...]


def vec(xs: Iterable) -> Vec:
    return tuple(Fraction(x) for x in xs)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a: Sequence, b: Sequence) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> Vec:
    return tuple(c * x for x in a)


def norm_sq(a: Sequence) -> Fraction:
    return dot(a, a)


def is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def primitive(a: Sequence) -> Vec:
    """Scale a nonzero rational vector to a coprime integer vector (same direction)."""
    den = lcm(*(Fraction(x).denominator for x in a))
    ints = [int(x * den) for x in a]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return tuple(Fraction(0) for _ in a)
    return tuple(Fraction(v // g) for v in ints)


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form. Returns (rows, pivot_columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vec]:
    """Basis of {x : R x = 0}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            x[pc] = -row[f]
        basis.append(tuple(x))
    return basis


def solve_any(A: Sequence[Sequence], b: Sequence, ncols: int) -> Vec | None:
    """Some solution of A x = b (free variables set to 0), or None if inconsistent."""
    if not A:
        return tuple(Fraction(0) for _ in range(ncols))
    aug = [tuple(row) + (Fraction(bi),) for row, bi in zip(A, b)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[ncols]
    return tuple(x)


def solve_unique(A: Sequence[Sequence], b: Sequence, ncols: int) -> Vec | None:
    """The unique solution of A x = b, or None when singular or inconsistent."""
    if rank(A, ncols) < ncols:
        return None
    return solve_any(A, b, ncols)


def independent_rows(rows: Sequence[Sequence], ncols: int) -> list:
    """Greedy maximal linearly independent subset (order preserving)."""
    out: list = []
    for r in rows:
        if rank(out + [r], ncols) > len(out):
            out.append(r)
    return out


def mat_vec(M: Sequence[Sequence], x: Sequence) -> Vec:
    return tuple(dot(row, x) for row in M)


def transpose(M: Sequence[Sequence]) -> list[Vec]:
    return [tuple(col) for col in zip(*M)]
