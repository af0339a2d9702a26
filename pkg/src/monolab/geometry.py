"""Exact polyhedral geometry over the rationals in small ambient dimension.

Polyhedra are stored in H-form ``{z : a.z <= b, e.z = d}``.  V-forms are
obtained by brute-force basis enumeration, which is exact and cheap at
dimension <= 4 with a dozen constraints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from . import linalg as la

INF = math.inf
SHRINK = 1 - Fraction(1, 2**20)

Point = tuple  # tuple[Fraction, ...]


class GeometryError(ValueError):
    pass


def as_point(z: Iterable) -> Point:
    return tuple(Fraction(x) for x in z)


def _norm_constraint(a, b) -> tuple[Point, Fraction]:
    return as_point(a), Fraction(b)


def _cone_hrep(gens: Sequence[Point], dim: int):
    """H-form of cone(gens): returns (normals a with a.z <= 0, normals e with e.z = 0)."""
    gens = [g for g in gens if not la.is_zero(g)]
    e_rows = la.nullspace(gens, dim) if gens else la.nullspace([], dim)
    if not gens:
        return [], e_rows
    k = la.rank(gens, dim)
    facets: set[Point] = set()
    for T in combinations(gens, k - 1):
        if k > 1 and la.rank(list(T), dim) < k - 1:
            continue
        sol = la.nullspace(list(T) + e_rows, dim)
        if len(sol) != 1:
            continue
        a = sol[0]
        vals = [la.dot(a, g) for g in gens]
        if all(v <= 0 for v in vals) and any(v < 0 for v in vals):
            facets.add(la.primitive(a))
        elif all(v >= 0 for v in vals) and any(v > 0 for v in vals):
            facets.add(la.primitive(la.scale(-1, a)))
    return sorted(facets), e_rows


@dataclass(frozen=True)
class Polyhedron:
    """Closed convex polyhedron ``{z : a.z <= b for ineqs, e.z = d for eqs}``."""

    dim: int
    ineqs: tuple = ()
    eqs: tuple = ()

    def __post_init__(self):
        ineqs = tuple(_norm_constraint(a, b) for a, b in self.ineqs)
        eqs = tuple(_norm_constraint(e, d) for e, d in self.eqs)
        for a, _ in ineqs + eqs:
            if len(a) != self.dim:
                raise GeometryError(f"constraint of length {len(a)} in dimension {self.dim}")
        object.__setattr__(self, "ineqs", ineqs)
        object.__setattr__(self, "eqs", eqs)

    # -- constructors -------------------------------------------------
    @classmethod
    def space(cls, dim: int) -> "Polyhedron":
        return cls(dim)

    @classmethod
    def hull(cls, points: Sequence, rays: Sequence = (), dim: int | None = None) -> "Polyhedron":
        """conv(points) + cone(rays), computed through the homogenized cone."""
        points = [as_point(p) for p in points]
        rays = [as_point(r) for r in rays]
        if not points:
            raise GeometryError("hull needs at least one point")
        d = dim if dim is not None else len(points[0])
        gens = [p + (Fraction(1),) for p in points] + [r + (Fraction(0),) for r in rays]
        facets, e_rows = _cone_hrep(gens, d + 1)
        # the homogenizing facet t >= 0 becomes the trivial 0 <= 1
        ineqs = tuple((a[:d], -a[d]) for a in facets if not la.is_zero(a[:d]))
        eqs = tuple((e[:d], -e[d]) for e in e_rows)
        return cls(d, ineqs, eqs)

    @classmethod
    def cone(cls, gens: Sequence, dim: int) -> "Polyhedron":
        facets, e_rows = _cone_hrep([as_point(g) for g in gens], dim)
        zero = Fraction(0)
        return cls(dim, tuple((a, zero) for a in facets), tuple((e, zero) for e in e_rows))

    @classmethod
    def point(cls, p) -> "Polyhedron":
        p = as_point(p)
        d = len(p)
        eye = [tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]
        return cls(d, (), tuple((eye[i], p[i]) for i in range(d)))

    @classmethod
    def segment(cls, a, b) -> "Polyhedron":
        return cls.hull([a, b])

    @classmethod
    def ray(cls, origin, direction) -> "Polyhedron":
        return cls.hull([origin], [direction])

    @classmethod
    def line(cls, origin, direction) -> "Polyhedron":
        d = as_point(direction)
        return cls.hull([origin], [d, la.scale(-1, d)])

    @classmethod
    def box(cls, center, radii) -> "Polyhedron":
        c = as_point(center)
        d = len(c)
        if not isinstance(radii, (tuple, list)):
            radii = [radii] * d
        ineqs = []
        for i in range(d):
            e = tuple(Fraction(int(i == j)) for j in range(d))
            ineqs.append((e, c[i] + Fraction(radii[i])))
            ineqs.append((la.scale(-1, e), -(c[i] - Fraction(radii[i]))))
        return cls(d, tuple(ineqs))

    # -- basic queries ------------------------------------------------
    def contains(self, z) -> bool:
        z = as_point(z)
        if len(z) != self.dim:
            raise GeometryError(f"point of length {len(z)} in dimension {self.dim}")
        return all(la.dot(a, z) <= b for a, b in self.ineqs) and all(
            la.dot(e, z) == d for e, d in self.eqs
        )

    def recession_contains(self, w) -> bool:
        return all(la.dot(a, w) <= 0 for a, _ in self.ineqs) and all(
            la.dot(e, w) == 0 for e, _ in self.eqs
        )

    @cached_property
    def _vrep(self):
        d = self.dim
        eq_rows = [e for e, _ in self.eqs]
        eq_rhs = [v for _, v in self.eqs]
        if eq_rows and la.solve_any(eq_rows, eq_rhs, d) is None:
            return None
        normals = [a for a, _ in self.ineqs] + eq_rows
        lineal = la.nullspace(normals, d) if normals else la.nullspace([], d)
        base_rows, base_rhs = [], []
        for e, v in self.eqs:
            if la.rank(base_rows + [e], d) > len(base_rows):
                base_rows.append(e)
                base_rhs.append(v)
        for l in lineal:
            base_rows.append(l)
            base_rhs.append(Fraction(0))
        k = d - len(base_rows)
        vertices: set[Point] = set()
        for S in combinations(self.ineqs, k):
            rows = base_rows + [a for a, _ in S]
            z = la.solve_unique(rows, base_rhs + [b for _, b in S], d)
            if z is not None and self.contains(z):
                vertices.add(z)
        if not vertices:
            return None
        rays: set[Point] = set()
        if k >= 1:
            for S in combinations(self.ineqs, k - 1):
                rows = base_rows + [a for a, _ in S]
                if la.rank(rows, d) != d - 1:
                    continue
                w = la.nullspace(rows, d)[0]
                for s in (1, -1):
                    sw = la.scale(s, w)
                    if all(la.dot(a, sw) <= 0 for a, _ in self.ineqs):
                        rays.add(la.primitive(sw))
        for l in lineal:
            rays.add(la.primitive(l))
            rays.add(la.primitive(la.scale(-1, l)))
        return sorted(vertices), sorted(rays)

    def vrep(self) -> tuple[list[Point], list[Point]]:
        """(vertices, rays) with P = conv(vertices) + cone(rays); lines appear as +/- rays."""
        v = self._vrep
        if v is None:
            raise GeometryError("empty polyhedron has no V-representation")
        return v

    def is_empty(self) -> bool:
        return self._vrep is None

    def is_bounded(self) -> bool:
        return not self.is_empty() and not self._vrep[1]

    def affine_dim(self) -> int:
        if self.is_empty():
            return -1
        verts, rays = self._vrep
        v0 = verts[0]
        return la.rank([la.sub(v, v0) for v in verts[1:]] + list(rays), self.dim) if (
            len(verts) > 1 or rays
        ) else 0

    def subset_of(self, other: "Polyhedron") -> bool:
        if self.is_empty():
            return True
        verts, rays = self._vrep
        return all(other.contains(v) for v in verts) and all(other.recession_contains(r) for r in rays)

    def same_set(self, other: "Polyhedron") -> bool:
        return self.subset_of(other) and other.subset_of(self)

    def is_cone(self) -> bool:
        return all(b == 0 for _, b in self.ineqs) and all(d == 0 for _, d in self.eqs)

    # -- operations ---------------------------------------------------
    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if other.dim != self.dim:
            raise GeometryError("dimension mismatch in intersection")
        return Polyhedron(self.dim, self.ineqs + other.ineqs, self.eqs + other.eqs)

    def active(self, p) -> tuple[list[Point], list[Point]]:
        p = as_point(p)
        return [a for a, b in self.ineqs if la.dot(a, p) == b], [e for e, _ in self.eqs]

    def tangent_cone(self, p) -> "Polyhedron":
        act, eqs = self.active(p)
        zero = Fraction(0)
        return Polyhedron(self.dim, tuple((a, zero) for a in act), tuple((e, zero) for e in eqs))

    def affine_image(self, Minv: Sequence[Sequence], t: Sequence | None = None) -> "Polyhedron":
        """Image under z -> M z + t, given Minv = M^{-1}."""
        t = as_point(t) if t is not None else tuple(Fraction(0) for _ in range(self.dim))
        MinvT = la.transpose(Minv)

        def conv(a, b):
            a2 = la.mat_vec(MinvT, a)
            return a2, b + la.dot(a2, t)

        return Polyhedron(
            self.dim,
            tuple(conv(a, b) for a, b in self.ineqs),
            tuple(conv(e, d) for e, d in self.eqs),
        )

    def translate(self, t) -> "Polyhedron":
        eye = [tuple(Fraction(int(i == j)) for j in range(self.dim)) for i in range(self.dim)]
        return self.affine_image(eye, t)

    def permute(self, perm: Sequence[int]) -> "Polyhedron":
        """Coordinates reordered so that new coordinate i is old coordinate perm[i]."""
        def conv(a, b):
            return tuple(a[perm[i]] for i in range(self.dim)), b

        return Polyhedron(self.dim, tuple(conv(a, b) for a, b in self.ineqs),
                          tuple(conv(e, d) for e, d in self.eqs))

    def slice(self, fixed: dict) -> "Polyhedron":
        """Fiber over fixed coordinates, as a polyhedron in the remaining ones."""
        keep = [i for i in range(self.dim) if i not in fixed]

        def conv(a, b):
            shift = sum((a[i] * Fraction(v) for i, v in fixed.items()), Fraction(0))
            return tuple(a[i] for i in keep), b - shift

        ineqs, eqs = [], []
        for a, b in self.ineqs:
            a2, b2 = conv(a, b)
            if la.is_zero(a2):
                if b2 < 0:
                    return Polyhedron(len(keep), ((tuple(Fraction(0) for _ in keep), Fraction(-1)),))
                continue
            ineqs.append((a2, b2))
        for e, d in self.eqs:
            e2, d2 = conv(e, d)
            if la.is_zero(e2):
                if d2 != 0:
                    return Polyhedron(len(keep), ((tuple(Fraction(0) for _ in keep), Fraction(-1)),))
                continue
            eqs.append((e2, d2))
        return Polyhedron(len(keep), tuple(ineqs), tuple(eqs))

    def to_json(self) -> dict:
        return {
            "ineqs": [{"a": [str(x) for x in a], "b": str(b)} for a, b in self.ineqs],
            "eqs": [{"e": [str(x) for x in e], "d": str(d)} for e, d in self.eqs],
        }

    @classmethod
    def from_json(cls, obj: dict, dim: int) -> "Polyhedron":
        ineqs = tuple((as_point(c["a"]), Fraction(c["b"])) for c in obj.get("ineqs", []))
        eqs = tuple((as_point(c.get("e", c.get("a"))), Fraction(c.get("d", c.get("b"))))
                    for c in obj.get("eqs", []))
        return cls(dim, ineqs, eqs)


@dataclass(frozen=True)
class PolyUnion:
    """Finite union of closed polyhedra; empty pieces are dropped on construction."""

    dim: int
    pieces: tuple = ()

    def __post_init__(self):
        pieces = tuple(p for p in self.pieces if not p.is_empty())
        for p in pieces:
            if p.dim != self.dim:
                raise GeometryError("piece dimension mismatch")
        object.__setattr__(self, "pieces", pieces)

    def contains(self, z) -> bool:
        return any(p.contains(z) for p in self.pieces)

    def is_empty(self) -> bool:
        return not self.pieces

    def intersect(self, P: Polyhedron) -> "PolyUnion":
        return type(self)(self.dim, tuple(q.intersect(P) for q in self.pieces))

    def map(self, fn) -> "PolyUnion":
        return type(self)(self.dim, tuple(fn(q) for q in self.pieces))

    def same_pieces(self, other: "PolyUnion") -> bool:
        """Piecewise set equality (each piece matched by an equal piece on the other side)."""
        return all(any(p.same_set(q) for q in other.pieces) for p in self.pieces) and all(
            any(q.same_set(p) for p in self.pieces) for q in other.pieces
        )

    def dedup(self) -> "PolyUnion":
        out: list[Polyhedron] = []
        for p in self.pieces:
            if not any(p.same_set(q) for q in out):
                out.append(p)
        return type(self)(self.dim, tuple(out))


class ConeUnion(PolyUnion):
    """Union of polyhedral cones (all right-hand sides zero)."""

    def __post_init__(self):
        super().__post_init__()
        for p in self.pieces:
            if not p.is_cone():
                raise GeometryError("cone piece with nonzero right-hand side")

    def generators(self) -> list[list[Point]]:
        """Nonnegative generators per piece (lines split into both directions)."""
        return [p.vrep()[1] for p in self.pieces]

    @classmethod
    def zero(cls, dim: int) -> "ConeUnion":
        return cls(dim, (Polyhedron.point([0] * dim),))


@dataclass(frozen=True)
class Window:
    """Open sup-norm box around a graph point; x-block radius rx, y-block radius ry."""

    center: tuple
    rx: Fraction
    ry: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "rx", Fraction(self.rx))
        object.__setattr__(self, "ry", Fraction(self.ry))
        if self.rx <= 0 or self.ry <= 0:
            raise GeometryError("window radii must be positive")
        if len(self.center) % 2:
            raise GeometryError("window center must live in R^{2n}")

    @classmethod
    def square(cls, center, r) -> "Window":
        return cls(center, r, r)

    @property
    def n(self) -> int:
        return len(self.center) // 2

    def radii(self) -> list[Fraction]:
        return [self.rx] * self.n + [self.ry] * self.n

    def box(self) -> Polyhedron:
        return Polyhedron.box(self.center, self.radii())

    def shrunk(self, factor: Fraction = SHRINK) -> "Window":
        return Window(self.center, self.rx * factor, self.ry * factor)

    def scaled(self, factor) -> "Window":
        return Window(self.center, self.rx * Fraction(factor), self.ry * Fraction(factor))

    def contains_open(self, z) -> bool:
        z = as_point(z)
        return all(abs(zi - ci) < ri for zi, ci, ri in zip(z, self.center, self.radii()))

    def to_json(self) -> dict:
        return {"center": [str(c) for c in self.center], "rx": str(self.rx), "ry": str(self.ry)}


# -- module-level operations --------------------------------------------

def contains(P: Polyhedron, z) -> bool:
    return P.contains(z)


def vrep(P: Polyhedron):
    return P.vrep()


def _check_member(C: PolyUnion, p: Point):
    if len(p) != C.dim:
        raise GeometryError("dimension mismatch")
    if not C.contains(p):
        raise GeometryError(f"point {tuple(map(str, p))} is not in the set")


def tangent_cone(C: PolyUnion, p) -> ConeUnion:
    """Bouligand tangent cone of a closed polyhedral union: union of active-constraint cones."""
    p = as_point(p)
    _check_member(C, p)
    return ConeUnion(C.dim, tuple(P.tangent_cone(p) for P in C.pieces if P.contains(p))).dedup()


def paratingent_cone(C: PolyUnion, p) -> ConeUnion:
    """Strict tangent cone: locally C = p + K with K the tangent cone, and T_*(0;K) = K - K."""
    p = as_point(p)
    K = tangent_cone(C, p)
    gens = K.generators()
    pieces = []
    for gi in gens:
        for gj in gens:
            pieces.append(Polyhedron.cone(list(gi) + [la.scale(-1, g) for g in gj], C.dim))
    return ConeUnion(C.dim, tuple(pieces)).dedup()


def _project_affine(p: Point, rows, rhs) -> Point:
    R = list(rows)
    G = [[la.dot(ri, rj) for rj in R] for ri in R]
    resid = [la.dot(ri, p) - bi for ri, bi in zip(R, rhs)]
    lam = la.solve_unique(G, resid, len(R))
    z = list(p)
    for li, ri in zip(lam, R):
        z = [zk - li * rk for zk, rk in zip(z, ri)]
    return tuple(z)


def dist_sq_polyhedron(p, P: Polyhedron):
    p = as_point(p)
    if P.is_empty():
        return INF
    if P.contains(p):
        return Fraction(0)
    base, base_rhs = [], []
    for e, d in P.eqs:
        if la.rank(base + [e], P.dim) > len(base):
            base.append(e)
            base_rhs.append(d)
    best = INF
    for k in range(0, P.dim - len(base) + 1):
        for S in combinations(P.ineqs, k):
            rows = base + [a for a, _ in S]
            if la.rank(rows, P.dim) < len(rows):
                continue
            z = _project_affine(p, rows, base_rhs + [b for _, b in S]) if rows else p
            if P.contains(z):
                best = min(best, la.norm_sq(la.sub(z, p)))
    return best


def dist_sq(p, C: PolyUnion):
    """Exact squared Euclidean distance from p to C; +inf when C is empty."""
    p = as_point(p)
    if len(p) != C.dim:
        raise GeometryError("dimension mismatch")
    best = INF
    for P in C.pieces:
        best = min(best, dist_sq_polyhedron(p, P))
    return best


def shift_matrix(n: int, gamma) -> list[tuple]:
    """Matrix of T_gamma(x, y) = (x, y + gamma x) on R^{2n}."""
    g = Fraction(gamma)
    M = []
    for i in range(2 * n):
        row = [Fraction(int(i == j)) for j in range(2 * n)]
        if i >= n:
            row[i - n] = g
        M.append(tuple(row))
    return M


def shift_set(C: PolyUnion, gamma, n: int | None = None) -> PolyUnion:
    """Image of C under T_gamma (applied exactly to every constraint system)."""
    n = n if n is not None else C.dim // 2
    Minv = shift_matrix(n, -Fraction(gamma))
    return C.map(lambda P: P.affine_image(Minv))


def swap_blocks(C: PolyUnion, n: int | None = None) -> PolyUnion:
    n = n if n is not None else C.dim // 2
    perm = list(range(n, 2 * n)) + list(range(n))
    return C.map(lambda P: P.permute(perm))
