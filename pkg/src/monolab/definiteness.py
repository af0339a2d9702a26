"""kappa-lower-definiteness of cone unions, decided through copositivity."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Sequence

import numpy as np

from . import linalg as la
from .geometry import ConeUnion, shift_set

MAX_ORDER = 12


class GeneratorCapError(ValueError):
    pass


@dataclass
class DefVerdict:
    holds: bool
    kappa: Fraction
    witness: tuple | None = None  # violating (u, v) when holds is False
    certificate: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "kappa": str(self.kappa),
            "witness": None if self.witness is None else [[str(c) for c in part] for part in self.witness],
            "certificate": self.certificate,
        }


def _check_sym(M: Sequence[Sequence]) -> list[list[Fraction]]:
    M = [[Fraction(x) for x in row] for row in M]
    m = len(M)
    if m > MAX_ORDER:
        raise GeneratorCapError(f"matrix order {m} exceeds cap {MAX_ORDER}")
    for i in range(m):
        if len(M[i]) != m:
            raise ValueError("matrix is not square")
        for j in range(i):
            if M[i][j] != M[j][i]:
                raise ValueError("matrix is not symmetric")
    return M


def quad(M, lam) -> Fraction:
    return sum((M[i][j] * lam[i] * lam[j] for i in range(len(lam)) for j in range(len(lam))), Fraction(0))


def copositive(M: Sequence[Sequence]):
    """Exact copositivity test by support enumeration.

    On each support S the simplex-restricted minimum, if interior to that
    face, solves ``M_SS lam = mu 1, sum(lam) = 1`` and takes the value mu.
    Singular systems are skipped: their minimizers can be slid onto a
    smaller support with the same value.

    Returns ``(holds, witness)`` where the witness is a primitive integer
    vector ``lam >= 0`` with ``lam' M lam < 0``.
    """
    M = _check_sym(M)
    m = len(M)
    for size in range(1, m + 1):
        for S in combinations(range(m), size):
            k = len(S)
            A = [[M[i][j] for j in S] + [Fraction(-1)] for i in S]
            A.append([Fraction(1)] * k + [Fraction(0)])
            rhs = [Fraction(0)] * k + [Fraction(1)]
            sol = la.solve_unique(A, rhs, k + 1)
            if sol is None:
                continue
            lam_s, mu = sol[:k], sol[k]
            if mu >= 0 or any(x < 0 for x in lam_s):
                continue
            lam = [Fraction(0)] * m
            for i, x in zip(S, lam_s):
                lam[i] = x
            return False, la.primitive(lam)
    return True, None


def gram_form(gens: Sequence[Sequence], n: int, kappa) -> list[list[Fraction]]:
    """M_ij = 1/2(<u_i,v_j> + <u_j,v_i>) - kappa <u_i,u_j> for generators r_i = (u_i, v_i)."""
    kappa = Fraction(kappa)
    us = [g[:n] for g in gens]
    vs = [g[n:] for g in gens]
    m = len(gens)
    return [
        [(la.dot(us[i], vs[j]) + la.dot(us[j], vs[i])) / 2 - kappa * la.dot(us[i], us[j]) for j in range(m)]
        for i in range(m)
    ]


def _combine(gens, lam):
    out = [Fraction(0)] * len(gens[0])
    for g, c in zip(gens, lam):
        out = [o + c * x for o, x in zip(out, g)]
    return tuple(out)


def lower_definite(K: ConeUnion, kappa) -> DefVerdict:
    """Decide <u,v> >= kappa |u|^2 on every piece of K (graph coordinates (u,v))."""
    kappa = Fraction(kappa)
    n = K.dim // 2
    cert = []
    for idx, gens in enumerate(K.generators()):
        if not gens:
            cert.append({"piece": idx, "generators": 0, "copositive": True})
            continue
        if len(gens) > MAX_ORDER:
            raise GeneratorCapError(f"piece {idx} has {len(gens)} generators")
        M = gram_form(gens, n, kappa)
        ok, lam = copositive(M)
        if not ok:
            w = _combine(gens, lam)
            return DefVerdict(False, kappa, (w[:n], w[n:]), cert)
        cert.append({"piece": idx, "generators": len(gens), "copositive": True})
    return DefVerdict(True, kappa, None, cert)


_GRID_CACHE: dict = {}


def _simplex_grid(m: int, N: int) -> np.ndarray:
    key = (m, N)
    if key not in _GRID_CACHE:
        if m == 1:
            pts = [[N]]
        else:
            pts = []
            for cuts in combinations(range(N + m - 1), m - 1):
                prev, row = -1, []
                for c in cuts:
                    row.append(c - prev - 1)
                    prev = c
                row.append(N + m - 2 - prev)
                pts.append(row)
        _GRID_CACHE[key] = np.array(pts, dtype=np.int64)
    return _GRID_CACHE[key]


def sample_lower_definite(K: ConeUnion, kappa, resolution: int = 64) -> DefVerdict:
    """Grid oracle: evaluate the form on integer combinations sum(k_i)=resolution of generators.

    It can refute but never prove; the form is evaluated exactly in integers.
    """
    kappa = Fraction(kappa)
    n = K.dim // 2
    for gens in K.generators():
        if not gens:
            continue
        M = gram_form(gens, n, kappa)
        den = lcm(*(x.denominator for row in M for x in row))
        Mi = [[int(x * den) for x in row] for row in M]
        grid = _simplex_grid(len(gens), resolution)
        big = max(abs(x) for row in Mi for x in row) * resolution * resolution * len(gens) ** 2
        if big < 2**62:
            A = np.array(Mi, dtype=np.int64)
            vals = np.einsum("pi,ij,pj->p", grid, A, grid)
            bad = np.nonzero(vals < 0)[0]
            hit = grid[bad[0]].tolist() if len(bad) else None
        else:
            hit = next((row.tolist() for row in grid if quad(Mi, row.tolist()) < 0), None)
        if hit is not None:
            w = _combine(gens, [Fraction(h) for h in hit])
            return DefVerdict(False, kappa, (w[:n], w[n:]))
    return DefVerdict(True, kappa)


def shift_cone(K: ConeUnion, gamma) -> ConeUnion:
    """{(u, v + gamma u) : (u, v) in K}."""
    return ConeUnion(K.dim, shift_set(K, gamma).pieces)


def cone_contains(K: ConeUnion, w) -> bool:
    return K.contains(w)
