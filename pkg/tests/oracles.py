"""Independent floating-point and brute-force oracles used by the tests.

None of these reuse the exact cone, copositivity or quadratic-programming
code paths; they only evaluate definitions on samples.
"""
from __future__ import annotations

import itertools
from fractions import Fraction as Fr

import numpy as np
from scipy.optimize import nnls

TOL = 1e-6


def float_pieces(U):
    """[(A, b, E, e)] float arrays for each polyhedron of a union."""
    out = []
    for P in U.pieces:
        A = np.array([[float(c) for c in a] for a, _ in P.ineqs], dtype=float).reshape(-1, P.dim)
        b = np.array([float(v) for _, v in P.ineqs], dtype=float)
        E = np.array([[float(c) for c in a] for a, _ in P.eqs], dtype=float).reshape(-1, P.dim)
        e = np.array([float(v) for _, v in P.eqs], dtype=float)
        out.append((A, b, E, e))
    return out


def _inside(piece, z, tol=1e-9):
    A, b, E, e = piece
    return bool(np.all(A @ z <= b + tol) and np.all(np.abs(E @ z - e) <= tol))


def direction_grid(dim, m=3):
    return [d for d in itertools.product(range(-m, m + 1), repeat=dim) if any(d)]


def feasible_directions(U, p, t=1e-6):
    """Per piece containing p: grid directions d with p + t d in the piece."""
    pf = np.array([float(c) for c in p])
    cones = []
    for piece in float_pieces(U):
        if not _inside(piece, pf):
            continue
        dirs = [d for d in direction_grid(len(p)) if _inside(piece, pf + t * np.array(d, dtype=float))]
        cones.append(dirs)
    return cones


def tangent_oracle(U, p, d) -> bool:
    pf = np.array([float(c) for c in p])
    z = pf + 1e-6 * np.array([float(c) for c in d])
    return any(_inside(piece, z) for piece in float_pieces(U) if _inside(piece, pf))


def _in_cone_difference(G1, G2, d) -> bool:
    cols = [np.array(g, dtype=float) for g in G1] + [-np.array(g, dtype=float) for g in G2]
    if not cols:
        return not any(d)
    M = np.stack(cols, axis=1)
    _, res = nnls(M, np.array(d, dtype=float))
    return res < TOL


def paratingent_oracle(U, p, d) -> bool:
    cones = feasible_directions(U, p)
    return any(_in_cone_difference(Ki, Kj, d) for Ki in cones for Kj in cones)


def pairwise_monotone_oracle(U, kappa, steps=64):
    """Brute force over rational grid points of each (bounded) piece; returns a violating pair or None."""
    pts = []
    for P in U.pieces:
        verts, _ = P.vrep()
        if len(verts) == 1:
            pts.append(verts[0])
            continue
        a, b = min(verts), max(verts)
        pts += [tuple(x + (y - x) * Fr(k, steps) for x, y in zip(a, b)) for k in range(steps + 1)]
    pts = sorted(set(pts))
    n = len(pts[0]) // 2 if pts else 1
    for p, q in itertools.combinations(pts, 2):
        dx = [p[i] - q[i] for i in range(n)]
        dy = [p[n + i] - q[n + i] for i in range(n)]
        if sum(u * v for u, v in zip(dx, dy)) < kappa * sum(u * u for u in dx):
            return p, q
    return None


SIGMAS = [Fr(0)] + [Fr(2**k) for k in range(0, 7)]
NEAR = [Fr(j, 2**12) for j in range(1, 257)] + [Fr(k, 64) for k in range(5, 17)]


def proximal_oracle(f, x, zeta) -> bool:
    """Definition check of the proximal inequality on a rational grid around x."""
    fx = f.value(x)
    for s in SIGMAS:
        ok = True
        for h in NEAR:
            for y in (x - h, x + h):
                fy = f.value(y)
                if fy != float("inf") and fy < fx + zeta * (y - x) - s / 2 * (y - x) ** 2:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def limiting_oracle(f, x, zeta) -> bool:
    if proximal_oracle(f, x, zeta):
        return True
    fx = f.value(x)
    delta, eta = Fr(1, 2**30), Fr(1, 2**44)
    for s in (-1, 1):
        z = x + s * delta
        fz, fw = f.value(z), f.value(z + eta)
        if fz == float("inf") or fw == float("inf"):
            continue
        slope = (fw - fz) / eta
        if abs(float(fz - fx)) < TOL and abs(float(slope - zeta)) < TOL:
            return True
    return False
