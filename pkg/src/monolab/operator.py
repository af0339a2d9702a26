"""Polyhedral set-valued operators F: R^n =) R^n stored through their graphs."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from . import linalg as la
from .geometry import (
    INF,
    GeometryError,
    Polyhedron,
    PolyUnion,
    Window,
    as_point,
    dist_sq,
    dist_sq_polyhedron,
    shift_set,
    swap_blocks,
    tangent_cone,
)
from .verdict import InputError, Verdict, parse_rat


@dataclass(frozen=True)
class PolyOperator:
    n: int
    graph: PolyUnion
    name: str = ""

    def __post_init__(self):
        if self.n not in (1, 2):
            raise InputError(f"n must be 1 or 2, got {self.n}")
        if self.graph.dim != 2 * self.n:
            raise InputError("graph dimension must be 2n")

    @classmethod
    def from_pieces(cls, n: int, pieces: Sequence[Polyhedron], name: str = "") -> "PolyOperator":
        return cls(n, PolyUnion(2 * n, tuple(pieces)), name)

    def contains(self, p) -> bool:
        return self.graph.contains(as_point(p))

    def evaluate(self, x) -> PolyUnion:
        """F(x) as a union of polyhedra in R^n."""
        x = as_point(x)
        return PolyUnion(self.n, tuple(P.slice({i: x[i] for i in range(self.n)}) for P in self.graph.pieces))

    def preimage(self, y) -> PolyUnion:
        y = as_point(y)
        n = self.n
        return PolyUnion(n, tuple(P.slice({n + i: y[i] for i in range(n)}) for P in self.graph.pieces))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "name": self.name,
            "pieces": [dict(kind="hrep", **P.to_json()) for P in self.graph.pieces],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PolyOperator":
        if not isinstance(obj, dict):
            raise InputError("operator: expected a JSON object")
        try:
            n = int(obj["n"])
        except (KeyError, TypeError, ValueError):
            raise InputError("operator.n: missing or not an integer") from None
        if n not in (1, 2):
            raise InputError(f"operator.n: must be 1 or 2, got {n}")
        raw = obj.get("pieces")
        if not isinstance(raw, list) or not raw:
            raise InputError("operator.pieces: expected a nonempty list")
        pieces = []
        for i, pc in enumerate(raw):
            where = f"operator.pieces[{i}]"

            def pt(key):
                if key not in pc:
                    raise InputError(f"{where}.{key}: missing")
                vals = pc[key]
                if not isinstance(vals, list) or len(vals) != 2 * n:
                    raise InputError(f"{where}.{key}: expected {2 * n} coordinates")
                return tuple(parse_rat(v, f"{where}.{key}") for v in vals)

            kind = pc.get("kind")
            try:
                if kind == "segment":
                    P = Polyhedron.segment(pt("a"), pt("b"))
                elif kind == "point":
                    P = Polyhedron.point(pt("at"))
                elif kind == "ray":
                    P = Polyhedron.ray(pt("from"), pt("dir"))
                elif kind == "line":
                    P = Polyhedron.line(pt("through"), pt("dir"))
                elif kind == "hrep":
                    P = Polyhedron(
                        2 * n,
                        tuple((tuple(parse_rat(x, f"{where}.ineqs") for x in c["a"]), parse_rat(c["b"], f"{where}.ineqs"))
                              for c in pc.get("ineqs", [])),
                        tuple((tuple(parse_rat(x, f"{where}.eqs") for x in c.get("e", c.get("a"))),
                               parse_rat(c.get("d", c.get("b")), f"{where}.eqs"))
                              for c in pc.get("eqs", [])),
                    )
                else:
                    raise InputError(f"{where}.kind: unknown kind {kind!r}")
            except (GeometryError, KeyError, TypeError) as exc:
                raise InputError(f"{where}: {exc}") from None
            if P.is_empty():
                raise InputError(f"{where}: empty piece")
            pieces.append(P)
        return cls.from_pieces(n, pieces, str(obj.get("name", "")))


def graph_point(x, y) -> tuple:
    return as_point(tuple(x) + tuple(y)) if isinstance(x, (tuple, list)) else as_point((x, y))


@dataclass(frozen=True)
class WindowSchedule:
    """Dyadic radii r0 * 2^-k, k = 0..K."""

    r0: Fraction = Fraction(1)
    K: int = 12

    def radii(self) -> list[Fraction]:
        return [Fraction(self.r0) / 2**k for k in range(self.K + 1)]


DEFAULT_SCHEDULE = WindowSchedule()


def shift(F: PolyOperator, gamma) -> PolyOperator:
    """Graph of F + gamma Id, i.e. T_gamma(gph F)."""
    return PolyOperator(F.n, shift_set(F.graph, gamma, F.n), F.name)


def shift_point(p, gamma, n: int = 1) -> tuple:
    p = as_point(p)
    g = Fraction(gamma)
    return p[:n] + tuple(p[n + i] + g * p[i] for i in range(n))


def invert(F: PolyOperator) -> PolyOperator:
    return PolyOperator(F.n, swap_blocks(F.graph, F.n), F.name)


def localize(F: PolyOperator, W: Window) -> PolyOperator:
    """Graph intersected with the closed box of W (possibly empty)."""
    if W.n != F.n:
        raise GeometryError("window dimension mismatch")
    return PolyOperator(F.n, F.graph.intersect(W.box()), F.name)


# -- local structure ----------------------------------------------------

def feature_sq(F: PolyOperator, p) -> Fraction | float:
    """Squared radius of the Euclidean ball on which gph F coincides with p + T(p; gph F)."""
    p = as_point(p)
    best = INF
    for P in F.graph.pieces:
        if P.contains(p):
            for a, b in P.ineqs:
                slack = b - la.dot(a, p)
                if slack > 0:
                    best = min(best, slack * slack / la.norm_sq(a))
        else:
            best = min(best, dist_sq_polyhedron(p, P))
    return best


def stabilized_radius(F: PolyOperator, p, schedule: WindowSchedule = DEFAULT_SCHEDULE):
    return _stabilized_radius(F, as_point(p), schedule)


@lru_cache(maxsize=4096)
def _stabilized_radius(F: PolyOperator, p, schedule: WindowSchedule):
    """First schedule radius r whose box sits inside the conic ball; (r, stabilized, feature_sq)."""
    fs = feature_sq(F, p)
    d = 2 * F.n
    radii = schedule.radii()
    for r in radii:
        if d * r * r < fs:
            return r, True, fs
    return radii[-1], False, fs


def stabilized_window(F: PolyOperator, p, schedule: WindowSchedule = DEFAULT_SCHEDULE):
    r, stable, fs = stabilized_radius(F, p, schedule)
    return Window.square(as_point(p), r), stable, fs


def _lines_2d(F: PolyOperator, box: Polyhedron):
    seen = {}
    for P in list(F.graph.pieces) + [box]:
        for a, b in list(P.ineqs) + list(P.eqs):
            if la.is_zero(a):
                continue
            s = 1 / (a[0] if a[0] != 0 else a[1])
            key = (a[0] * s, a[1] * s, b * s)
            seen[key] = ((key[0], key[1]), key[2])
    return list(seen.values())


@lru_cache(maxsize=4096)
def graph_reps(F: PolyOperator, W: Window) -> list[tuple]:
    """One graph point per face of the constraint arrangement meeting the open window.

    Tangent-cone structure is constant on each face, so a property of the
    local cones holds on gph F inside W iff it holds at these points.
    Only implemented in R^2 (n = 1).
    """
    if F.n != 1:
        raise GeometryError("graph_reps is implemented for n = 1 only")
    box = W.box()
    lines = _lines_2d(F, box)
    verts: set = set()
    for (a1, b1), (a2, b2) in combinations(lines, 2):
        z = la.solve_unique([a1, a2], [b1, b2], 2)
        if z is not None and box.contains(z):
            verts.add(z)
    cands = set(verts)
    for a, b in lines:
        d = (-a[1], a[0])
        on = sorted((v for v in verts if la.dot(a, v) == b), key=lambda v: la.dot(d, v))
        for v1, v2 in zip(on, on[1:]):
            m = tuple((x + y) / 2 for x, y in zip(v1, v2))
            cands.add(m)
            for sgn in (1, -1):
                nrm = la.scale(sgn, a)
                best = None
                for a2, b2 in lines:
                    c = la.dot(a2, nrm)
                    if c == 0:
                        continue
                    s = (b2 - la.dot(a2, m)) / c
                    if s > 0 and (best is None or s < best):
                        best = s
                step = best / 2 if best is not None else Fraction(1)
                cands.add(la.add(m, la.scale(step, nrm)))
    return sorted(z for z in cands if W.contains_open(z) and F.graph.contains(z))


# -- predicates ---------------------------------------------------------

def _direction_sides(K, n: int = 1):
    up = down = False
    for gens in K.generators():
        for g in gens:
            if g[n] > 0:
                up = True
            if g[n] < 0:
                down = True
    return up, down


def inverse_dist_sq(F: PolyOperator, x, y):
    return dist_sq(as_point(x if isinstance(x, (tuple, list)) else (x,)),
                   F.preimage(y if isinstance(y, (tuple, list)) else (y,)))


def inner_semicontinuous_at(F: PolyOperator, ybar, xbar, schedule: WindowSchedule = DEFAULT_SCHEDULE) -> Verdict:
    """Whether xbar lies in liminf_{y -> ybar} F^{-1}(y) (n = 1)."""
    name = "inner_semicontinuous"
    if F.n != 1:
        return Verdict.unsupported_dims(name, F.n)
    xbar, ybar = Fraction(xbar), Fraction(ybar)
    p = (xbar, ybar)
    if not F.contains(p):
        raise GeometryError("(xbar, ybar) is not a graph point")
    K = tangent_cone(F.graph, p)
    r, stable, fs = stabilized_radius(F, p, schedule)
    slopes = {}
    for gens in K.generators():
        for u, v in gens:
            if v != 0:
                side = 1 if v > 0 else -1
                ratio = abs(u / v)
                slopes[side] = min(slopes.get(side, ratio), ratio)
    if 1 in slopes and -1 in slopes:
        L = max(slopes.values())
        pairs = [{"delta": d, "eta": min(d, r) / (L + 1)} for d in schedule.radii()]
        return Verdict(True, name, {"conic_radius": r, "inverse_slope": L, "delta_eta": pairs},
                       window=Window.square(p, r), stabilized=stable)
    side = 1 if 1 not in slopes else -1
    y_w = ybar + side * r / 2
    wit = {"side": side, "delta": r, "y": y_w, "dist_sq": inverse_dist_sq(F, xbar, y_w)}
    return Verdict(False, name, {"conic_radius": r, "missing_side": side}, witness=wit,
                   window=Window.square(p, r), stabilized=stable)


def locally_closed_at(F: PolyOperator, p, W: Window | None = None) -> Verdict:
    """Pieces are non-strict H-polyhedra, hence closed; their finite union is closed."""
    p = as_point(p)
    if not F.contains(p):
        raise GeometryError("point is not on the graph")
    closed = all(isinstance(P, Polyhedron) for P in F.graph.pieces)
    return Verdict(closed, "locally_closed",
                   {"pieces": len(F.graph.pieces), "representation": "non-strict H-form"}, window=W)
