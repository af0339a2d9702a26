"""Monotonicity and metric-regularity predicates for polyhedral operators.

Maximality, strong metric (sub)regularity and the regularity-modulus
bounds are implemented for operators on R^1 only; n = 2 yields an explicit
unsupported verdict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import linalg as la
from .definiteness import lower_definite
from .derivative import BOULIGAND, STRICT, graphical_derivative, strict_graphical_derivative
from .geometry import INF, GeometryError, Polyhedron, PolyUnion, Window, as_point, dist_sq
from .operator import (
    DEFAULT_SCHEDULE,
    PolyOperator,
    WindowSchedule,
    graph_reps,
    localize,
    shift,
    shift_point,
    stabilized_radius,
)
from .verdict import MonoVerdict, Verdict


class UnboundedError(ValueError):
    pass


# -- exact nonconvex QP over a polytope ---------------------------------

def min_quadratic_over_polytope(Q: Sequence[Sequence], c: Sequence, P: Polyhedron):
    """Global minimum of z'Qz + c'z over a bounded polyhedron.

    Every face is visited through an independent set of active constraints;
    the stationarity system on the face's affine hull is solved exactly and
    feasible isolated critical points are kept.  Faces whose system is
    singular have their minimum on a smaller face, which is visited too.
    Returns ``(min, argmin)``.
    """
    d = P.dim
    if P.is_empty():
        raise GeometryError("empty polyhedron")
    if not P.is_bounded():
        raise UnboundedError("polyhedron is unbounded")
    Q = [[(Fraction(Q[i][j]) + Fraction(Q[j][i])) / 2 for j in range(d)] for i in range(d)]
    c = as_point(c)
    eq_rows = [e for e, _ in P.eqs]
    z0 = la.solve_any(eq_rows, [v for _, v in P.eqs], d)
    N = la.nullspace(eq_rows, d) if eq_rows else la.nullspace([], d)
    k = len(N)
    Nt = N  # rows are basis vectors; z = z0 + sum t_i N[i]

    def lift(t):
        z = list(z0)
        for ti, col in zip(t, Nt):
            z = [zj + ti * cj for zj, cj in zip(z, col)]
        return tuple(z)

    def objective(z):
        return sum((Q[i][j] * z[i] * z[j] for i in range(d) for j in range(d)), Fraction(0)) + la.dot(c, z)

    if k == 0:
        return objective(z0), z0
    QN = [la.mat_vec(Q, col) for col in Nt]  # Q n_j
    Qt = [[la.dot(Nt[i], QN[j]) for j in range(k)] for i in range(k)]
    Qz0 = la.mat_vec(Q, z0)
    ct = [2 * la.dot(Nt[i], Qz0) + la.dot(Nt[i], c) for i in range(k)]
    A, b = [], []
    for a, bb in P.ineqs:
        row = tuple(la.dot(a, col) for col in Nt)
        rhs = bb - la.dot(a, z0)
        if la.is_zero(row):
            continue
        A.append(row)
        b.append(rhs)

    def feasible(t):
        return all(la.dot(r, t) <= bi for r, bi in zip(A, b))

    best, arg = None, None
    for size in range(0, k + 1):
        for S in combinations(range(len(A)), size):
            rows = [A[i] for i in S]
            if size and la.rank(rows, k) < size:
                continue
            M = [[2 * Qt[i][j] for j in range(k)] + [-rows[s][i] for s in range(size)] for i in range(k)]
            M += [list(rows[s]) + [Fraction(0)] * size for s in range(size)]
            rhs = [-x for x in ct] + [b[i] for i in S]
            sol = la.solve_unique(M, rhs, k + size)
            if sol is None:
                continue
            t = sol[:k]
            if not feasible(t):
                continue
            z = lift(t)
            val = objective(z)
            if best is None or val < best:
                best, arg = val, z
    return best, arg


# -- local monotonicity --------------------------------------------------

def _pair_form(n: int, kappa: Fraction):
    m = 4 * n
    Q = [[Fraction(0)] * m for _ in range(m)]
    X, Y, X2, Y2 = 0, n, 2 * n, 3 * n
    half = Fraction(1, 2)
    for k in range(n):
        for (i, j, s) in ((X, Y, half), (X, Y2, -half), (X2, Y, -half), (X2, Y2, half)):
            Q[i + k][j + k] += s
            Q[j + k][i + k] += s
        Q[X + k][X + k] -= kappa
        Q[X2 + k][X2 + k] -= kappa
        Q[X + k][X2 + k] += kappa
        Q[X2 + k][X + k] += kappa
    return Q


def _product(P: Polyhedron, R: Polyhedron) -> Polyhedron:
    d1, d2 = P.dim, R.dim
    z1, z2 = (Fraction(0),) * d2, (Fraction(0),) * d1
    ineqs = tuple((a + z1, b) for a, b in P.ineqs) + tuple((z2 + a, b) for a, b in R.ineqs)
    eqs = tuple((e + z1, v) for e, v in P.eqs) + tuple((z2 + e, v) for e, v in R.eqs)
    return Polyhedron(d1 + d2, ineqs, eqs)


def _as_segment(P: Polyhedron):
    """(a, b) when P is a point or a bounded segment, else None."""
    verts, rays = P.vrep()
    if rays or len(verts) > 2:
        return None
    return (verts[0], verts[-1])


def _box_quadratic_min(A, B, C, D, E, F0):
    """Exact min of A s^2 + B st + C t^2 + D s + E t + F0 over [0,1]^2; (value, s, t)."""
    f = lambda s, t: A * s * s + B * s * t + C * t * t + D * s + E * t + F0
    cands = [(s, t) for s in (0, 1) for t in (0, 1)]
    for s in (0, 1):
        if C > 0:
            t = -(B * s + E) / (2 * C)
            if 0 < t < 1:
                cands.append((s, t))
    for t in (0, 1):
        if A > 0:
            s = -(B * t + D) / (2 * A)
            if 0 < s < 1:
                cands.append((s, t))
    det = 4 * A * C - B * B
    if det != 0:
        s = (-2 * C * D + B * E) / det
        t = (-2 * A * E + B * D) / det
        if 0 < s < 1 and 0 < t < 1:
            cands.append((s, t))
    return min((f(Fraction(s), Fraction(t)), Fraction(s), Fraction(t)) for s, t in cands)


def _segment_pair_min(Q, seg1, seg2):
    """min of z'Qz with z = (p, q), p on seg1 and q on seg2."""
    (a0, a1), (b0, b1) = seg1, seg2
    zero = (Fraction(0),) * len(a0)
    z0 = a0 + b0
    e1 = la.sub(a1, a0) + zero
    e2 = zero + la.sub(b1, b0)

    def form(u, v):
        return la.dot(u, la.mat_vec(Q, v))

    val, s, t = _box_quadratic_min(form(e1, e1), 2 * form(e1, e2), form(e2, e2),
                                   2 * form(e1, z0), 2 * form(e2, z0), form(z0, z0))
    z = la.add(la.add(z0, la.scale(s, e1)), la.scale(t, e2))
    return val, z


def _is_single_point(G: PolyOperator) -> bool:
    pts = set()
    for P in G.graph.pieces:
        verts, rays = P.vrep()
        if rays or len(verts) > 1:
            return False
        pts.add(verts[0])
    return len(pts) <= 1


def local_monotone(F: PolyOperator, W: Window, kappa=0) -> MonoVerdict:
    """<y-y', x-x'> >= kappa |x-x'|^2 on gph F within the (shrunk, closed) window box."""
    kappa = Fraction(kappa)
    G = localize(F, W.shrunk())
    pieces = G.graph.pieces
    degenerate = _is_single_point(G)
    Q = _pair_form(F.n, kappa)
    zeros = [Fraction(0)] * (4 * F.n)
    segs = [_as_segment(P) for P in pieces]
    mins = []
    for i in range(len(pieces)):
        for j in range(i, len(pieces)):
            if segs[i] is not None and segs[j] is not None:
                val, z = _segment_pair_min(Q, segs[i], segs[j])
            else:
                val, z = min_quadratic_over_polytope(Q, zeros, _product(pieces[i], pieces[j]))
            mins.append({"pieces": [i, j], "min": val})
            if val < 0:
                d = 2 * F.n
                return MonoVerdict(False, "local_monotone", {"pair_minima": mins},
                                   witness=(z[:d], z[d:]), window=W, kappa=kappa)
    return MonoVerdict(True, "local_monotone", {"pair_minima": mins}, window=W, kappa=kappa,
                       degenerate=degenerate)


# -- compatibility region and local maximality (n = 1) ------------------

def _quadrant(a, upper: bool) -> Polyhedron:
    s = 1 if upper else -1
    return Polyhedron(2, (((-s, 0), -s * a[0]), ((0, -s), -s * a[1])))


def _piece_compat(P: Polyhedron) -> list[Polyhedron]:
    verts, rays = P.vrep()
    if rays:
        raise GeometryError("localized piece is unbounded")
    if len(verts) == 1:
        a = verts[0]
        return [_quadrant(a, False), _quadrant(a, True)]
    if P.affine_dim() != 1:
        raise GeometryError("a monotone graph piece has dimension at most one")
    a, b = min(verts), max(verts)
    dx, dy = b[0] - a[0], b[1] - a[1]
    if dx < 0 or dy < 0:
        raise GeometryError("decreasing piece in a monotone graph")
    out = [_quadrant(a, False), _quadrant(b, True)]
    if dy == 0:
        out.append(Polyhedron(2, (), (((0, 1), a[1]),)))
    elif dx == 0:
        out.append(Polyhedron(2, (), (((1, 0), a[0]),)))
    else:
        out.append(P)
    return out


def compatibility_region(F: PolyOperator, W: Window) -> PolyUnion:
    """Points of the doubly-shrunk box monotonically compatible with gph F in the shrunk box."""
    if F.n != 1:
        raise GeometryError("compatibility region is implemented for n = 1 only")
    mono = local_monotone(F, W, 0)
    if not mono.holds:
        raise GeometryError("localized graph is not monotone")
    G = localize(F, W.shrunk())
    region = [W.shrunk().shrunk().box()]
    for P in G.graph.pieces:
        opts = _piece_compat(P)
        nxt: list[Polyhedron] = []
        for R in region:
            for C in opts:
                I = R.intersect(C)
                if not I.is_empty() and not any(I.subset_of(J) for J in nxt):
                    nxt = [J for J in nxt if not J.subset_of(I)] + [I]
        region = nxt
    return PolyUnion(2, tuple(region))


def _excess_point(C: Polyhedron, G: PolyUnion):
    """A point of C outside G (G a union of sets of dimension <= 1), or None."""
    verts, _ = C.vrep()
    dim = C.affine_dim()
    if dim == 0:
        return None if G.contains(verts[0]) else verts[0]
    if dim == 2:
        cen = tuple(sum(v[i] for v in verts) / len(verts) for i in range(2))
        cands = [cen] + [tuple(ci + (vi - ci) / m for ci, vi in zip(cen, v)) for m in (2, 3, 5, 7) for v in verts]
        for z in cands:
            if not G.contains(z):
                return z
        raise AssertionError("could not find an off-graph point in a planar cell")
    c0, c1 = min(verts), max(verts)
    d = la.sub(c1, c0)
    dd = la.norm_sq(d)
    intervals = []
    for Q in G.pieces:
        I = C.intersect(Q)
        if I.is_empty():
            continue
        ts = [la.dot(la.sub(v, c0), d) / dd for v in I.vrep()[0]]
        intervals.append((min(ts), max(ts)))
    intervals.sort()
    reach = Fraction(0)
    for lo, hi in intervals:
        if lo > reach:
            break
        reach = max(reach, hi)
        if reach >= 1:
            return None
    nxt = next((lo for lo, _ in intervals if lo > reach), Fraction(1))
    t = (reach + nxt) / 2
    return la.add(c0, la.scale(t, d))


def maximal_monotone_on(F: PolyOperator, W: Window) -> MonoVerdict:
    """Local monotonicity on W plus absence of compatible off-graph points inside W."""
    mono = local_monotone(F, W, 0)
    if not mono.holds:
        mono.name = "locally_maximal_monotone"
        mono.certificate["reason"] = "not monotone"
        return mono
    Comp = compatibility_region(F, W)
    G = localize(F, W.shrunk()).graph
    for C in Comp.pieces:
        w = _excess_point(C, G)
        if w is not None:
            return MonoVerdict(False, "locally_maximal_monotone",
                               {"reason": "compatible point off the graph", "compat_pieces": len(Comp.pieces)},
                               witness={"extra_point": w}, window=W)
    return MonoVerdict(True, "locally_maximal_monotone", {"compat_pieces": len(Comp.pieces)},
                       window=W, degenerate=mono.degenerate)


def locally_maximal_monotone(F: PolyOperator, p, schedule: WindowSchedule = DEFAULT_SCHEDULE,
                             all_windows: bool = False) -> MonoVerdict:
    """Local maximal monotonicity at p, decided on the stabilized window.

    Below the feature scale the localized graph is a scaled copy of the
    tangent cone, so every smaller window returns the same verdict.  With
    ``all_windows`` the per-window verdicts of the whole schedule are
    recorded in the certificate as well.
    """
    name = "locally_maximal_monotone"
    if F.n != 1:
        return Verdict.unsupported_dims(name, F.n)
    p = as_point(p)
    if not F.contains(p):
        raise GeometryError("point is not on the graph")
    r, stable, fs = stabilized_radius(F, p, schedule)
    v = maximal_monotone_on(F, Window.square(p, r))
    v.stabilized = stable
    v.certificate["feature_sq"] = fs
    if all_windows:
        v.certificate["per_window"] = {
            str(rk): maximal_monotone_on(F, Window.square(p, rk)).holds for rk in schedule.radii()
        }
    return v


def _piece_slopes(G: PolyOperator):
    slopes = []
    for P in G.graph.pieces:
        verts, rays = P.vrep()
        dirs = [la.sub(v, verts[0]) for v in verts[1:]] + list(rays)
        for dx, dy in dirs:
            if dx != 0:
                slopes.append(dy / dx)
    return slopes


def locally_maximal_hypomonotone(F: PolyOperator, p, schedule: WindowSchedule = DEFAULT_SCHEDULE):
    """(verdict, rho): local maximal monotonicity of F + rho Id with rho from the slope bound."""
    if F.n != 1:
        return Verdict.unsupported_dims("locally_maximal_hypomonotone", F.n), None
    p = as_point(p)
    r, _, _ = stabilized_radius(F, p, schedule)
    slopes = _piece_slopes(localize(F, Window.square(p, r)))
    rho = max(Fraction(0), -min(slopes, default=Fraction(0))) + 1
    v = locally_maximal_monotone(shift(F, rho), shift_point(p, rho), schedule)
    v.name = "locally_maximal_hypomonotone"
    v.certificate["rho"] = rho
    return v, rho


def strongly_locally_maximal_monotone(F: PolyOperator, p, kappa, schedule: WindowSchedule = DEFAULT_SCHEDULE,
                                      all_windows: bool = False) -> MonoVerdict:
    kappa = Fraction(kappa)
    if kappa <= 0:
        raise ValueError("kappa must be positive; use locally_maximal_monotone on a shifted operator")
    v = locally_maximal_monotone(shift(F, -kappa), shift_point(p, -kappa, F.n), schedule, all_windows)
    v.name = "strongly_locally_maximal_monotone"
    if isinstance(v, MonoVerdict):
        v.kappa = kappa
    return v


# -- strong metric regularity (n = 1) -----------------------------------

@dataclass
class LipschitzLocalization:
    pieces: list  # (y0, y1, x0, x1): affine x(y) on [y0, y1]
    lipschitz_constant: Fraction
    domain_window: Window

    def __call__(self, y):
        y = Fraction(y)
        for y0, y1, x0, x1 in self.pieces:
            if y0 <= y <= y1:
                return x0 + (x1 - x0) * (y - y0) / (y1 - y0) if y1 != y0 else x0
        raise ValueError("y outside the localization domain")

    def to_json(self) -> dict:
        return {
            "pieces": [[str(v) for v in pc] for pc in self.pieces],
            "lipschitz_constant": str(self.lipschitz_constant),
            "domain_window": self.domain_window.to_json(),
        }


def _interval(U: PolyUnion):
    """Slice of a union in R^1; returns list of (lo, hi) per nonempty piece."""
    out = []
    for P in U.pieces:
        verts, rays = P.vrep()
        lo = min(v[0] for v in verts)
        hi = max(v[0] for v in verts)
        for (r,) in rays:
            if r > 0:
                hi = INF
            if r < 0:
                lo = -INF
        out.append((lo, hi))
    return out


def _smr_on(F: PolyOperator, W: Window):
    """Slice test on the closed shrunk box; returns (LipschitzLocalization | None, witness)."""
    Wc = W.shrunk()
    G = localize(F, Wc)
    xbar, ybar = Wc.center
    ylo, yhi = ybar - Wc.ry, ybar + Wc.ry
    bps = {ylo, yhi}
    pieces = G.graph.pieces
    for P in pieces:
        bps.update(v[1] for v in P.vrep()[0])
    for P, R in combinations(pieces, 2):
        I = P.intersect(R)
        if not I.is_empty():
            bps.update(v[1] for v in I.vrep()[0])
    ys = sorted(y for y in bps if ylo <= y <= yhi)
    tests = []
    for a, b in zip(ys, ys[1:]):
        tests += [a, (a + b) / 2]
    tests.append(ys[-1])
    values = {}
    for y in tests:
        ivs = _interval(G.preimage((y,)))
        xs = {lo for lo, hi in ivs if lo == hi}
        if not ivs:
            return None, {"y": y, "reason": "no preimage in U"}
        if any(lo != hi for lo, hi in ivs) or len(xs) > 1:
            return None, {"y": y, "reason": "several preimages in U", "slices": ivs}
        values[y] = xs.pop()
    loc, lip = [], Fraction(0)
    for a, b in zip(ys, ys[1:]):
        xa, xb, xm = values[a], values[b], values[(a + b) / 2]
        if 2 * xm != xa + xb:
            return None, {"y": (a + b) / 2, "reason": "non-affine branch"}
        loc.append((a, b, xa, xb))
        lip = max(lip, abs(xb - xa) / (b - a))
    return LipschitzLocalization(loc, lip, W), None


def strongly_metrically_regular(F: PolyOperator, p, schedule: WindowSchedule = DEFAULT_SCHEDULE):
    """(verdict, localization): single-valued Lipschitz localization of F^{-1} around p."""
    name = "strongly_metrically_regular"
    if F.n != 1:
        return Verdict.unsupported_dims(name, F.n), None
    p = as_point(p)
    r, stable, _ = stabilized_radius(F, p, schedule)
    last = None
    for j in range(schedule.K + 1):
        W = Window(p, r, r / 2**j)
        loc, wit = _smr_on(F, W)
        if loc is not None:
            return MonoVerdict(True, name, {"lipschitz_constant": loc.lipschitz_constant, "y_shrink": j},
                               window=W, stabilized=stable), loc
        last = wit
    return MonoVerdict(False, name, {"conic_radius": r}, witness=last, window=Window.square(p, r),
                       stabilized=stable), None


def _affine_from(x1, v1, x2, v2):
    a = (v2 - v1) / (x2 - x1)
    return a, v1 - a * x1


def _rational_sqrt_up(q: Fraction, bits: int = 40) -> Fraction:
    """Smallest-ish rational >= sqrt(q); exact when q is a rational square."""
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    scale = 2**bits
    s = math.isqrt(num * scale * scale // den)
    return Fraction(s + 1, scale)


def _rational_sqrt_down(q: Fraction, bits: int = 40) -> Fraction:
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    scale = 2**bits
    return Fraction(math.isqrt(num * scale * scale // den), scale)


def subregularity_ratio_inf(F: PolyOperator, xbar, ybar, rx):
    """Exact inf over 0 < |x - xbar| <= rx of d(ybar, F(x))^2 / (x - xbar)^2 (n = 1)."""
    xbar, ybar = Fraction(xbar), Fraction(ybar)
    strip = Polyhedron(2, (((1, 0), xbar + rx), ((-1, 0), -(xbar - rx))))
    level = Polyhedron(2, (), (((0, 1), ybar),))
    pieces = [P.intersect(strip) for P in F.graph.pieces]
    pieces = [P for P in pieces if not P.is_empty()]
    bps = {xbar - rx, xbar, xbar + rx}
    for P in pieces:
        bps.update(v[0] for v in P.vrep()[0])
        I = P.intersect(level)
        if not I.is_empty():
            bps.update(v[0] for v in I.vrep()[0])
    xs = sorted(x for x in bps if abs(x - xbar) <= rx)

    def g_at(x):
        return dist_sq((ybar,), F.evaluate((x,)))

    best, arg = INF, None
    for x in xs:
        if x != xbar:
            h = g_at(x) / (x - xbar) ** 2
            if h < best:
                best, arg = h, x
    for x1, x2 in zip(xs, xs[1:]):
        t1, t2 = x1 + (x2 - x1) / 3, x1 + 2 * (x2 - x1) / 3
        for P in pieces:
            s1, s2 = _interval(PolyUnion(1, (P.slice({0: t1}),))), _interval(PolyUnion(1, (P.slice({0: t2}),)))
            if not s1 or not s2:
                continue
            (lo1, hi1), (lo2, hi2) = s1[0], s2[0]
            if lo1 <= ybar <= hi1:
                return Fraction(0), t1
            if ybar < lo1:
                a, bcoef = _affine_from(t1, lo1 - ybar, t2, lo2 - ybar)
            else:
                a, bcoef = _affine_from(t1, ybar - hi1, t2, ybar - hi2)
            # distance A(x) = a (x - xbar) + c
            c = a * xbar + bcoef
            if c == 0:
                val = a * a
                if val < best:
                    best, arg = val, t1
                continue
            ws = [1 / (x - xbar) for x in (x1, x2) if x != xbar]
            lo_w, hi_w = min(ws), max(ws)
            if len(ws) == 2:
                wstar = -a / c
                if lo_w < wstar < hi_w:
                    return Fraction(0), xbar + 1 / wstar
            for w in ws:
                val = (a + c * w) ** 2
                if val < best:
                    best, arg = val, xbar + 1 / w
    return best, arg


def strongly_metrically_subregular(F: PolyOperator, p, schedule: WindowSchedule = DEFAULT_SCHEDULE):
    """(verdict, kappa) with |x - xbar| <= kappa d(ybar; F(x)) on the stabilized x-window."""
    name = "strongly_metrically_subregular"
    if F.n != 1:
        return Verdict.unsupported_dims(name, F.n), None
    p = as_point(p)
    r, stable, _ = stabilized_radius(F, p, schedule)
    inf_h, arg = subregularity_ratio_inf(F, p[0], p[1], r * (1 - Fraction(1, 2**20)))
    if inf_h == 0:
        return MonoVerdict(False, name, {"inf_ratio_sq": inf_h}, witness={"x": arg},
                           window=Window.square(p, r), stabilized=stable), None
    if inf_h == INF:
        kappa_sq = Fraction(0)
    else:
        kappa_sq = 1 / inf_h
    kappa = _rational_sqrt_up(kappa_sq) if kappa_sq else Fraction(0)
    return MonoVerdict(True, name, {"inf_ratio_sq": inf_h, "kappa_sq": kappa_sq}, window=Window.square(p, r),
                       stabilized=stable, kappa=kappa), kappa


# -- metric regularity modulus bounds -----------------------------------

@dataclass
class RegBounds:
    lower_sq: Fraction | float
    upper_sq: Fraction | float
    window: Window
    detail: dict = field(default_factory=dict)

    @property
    def lower(self):
        return self.lower_sq if self.lower_sq == INF else _rational_sqrt_down(Fraction(self.lower_sq))

    @property
    def upper(self):
        return self.upper_sq if self.upper_sq == INF else _rational_sqrt_up(Fraction(self.upper_sq))

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "lower_sq": self.lower_sq,
                "upper_sq": self.upper_sq, "window": self.window, **self.detail}


def cones_around(F: PolyOperator, p, kind: str = BOULIGAND, schedule: WindowSchedule = DEFAULT_SCHEDULE):
    r, _, _ = stabilized_radius(F, p, schedule)
    pts = graph_reps(F, Window.square(as_point(p), r))
    deriv = strict_graphical_derivative if kind == STRICT else graphical_derivative
    return [deriv(F, z).cone for z in pts]


def sup_lower_definite_kappa(cones, lo=Fraction(-2**10), hi=Fraction(2**10), step=Fraction(1, 2**20)):
    """Bracket the supremal kappa with all cones kappa-lower-definite by dyadic bisection.

    Returns (lo, hi): lo certified (or None when even the bottom fails), hi refuted
    (or None when the top holds).
    """
    def ok(k):
        return all(lower_definite(K, k).holds for K in cones)

    if not ok(lo):
        return None, lo
    if ok(hi):
        return hi, None
    while hi - lo > step:
        mid = (lo + hi) / 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def _fiber(F: PolyOperator, coord: int, value) -> list[tuple]:
    """Intervals of the other coordinate on {z in gph F : z[coord] = value} (n = 1)."""
    other = 1 - coord
    out = []
    for P in F.graph.pieces:
        lo, hi = -INF, INF
        for (a, b), is_eq in [(c, False) for c in P.ineqs] + [(c, True) for c in P.eqs]:
            c, rhs = a[other], b - a[coord] * value
            if c == 0:
                if rhs < 0 or (is_eq and rhs != 0):
                    break
                continue
            t = rhs / c
            if is_eq:
                lo, hi = max(lo, t), min(hi, t)
            elif c > 0:
                hi = min(hi, t)
            else:
                lo = max(lo, t)
        else:
            if lo <= hi:
                out.append((lo, hi))
    return out


def _interval_dist_sq(t, ivs):
    if not ivs:
        return INF
    return min(max(lo - t, t - hi, 0) ** 2 for lo, hi in ivs)


def pointwise_ratio_sq(F: PolyOperator, x, y):
    """d(x;F^{-1}(y))^2 / d(y;F(x))^2 with the empty-set convention; None when not informative."""
    x, y = Fraction(x), Fraction(y)
    return _ratio(_interval_dist_sq(x, _fiber(F, 1, y)), _interval_dist_sq(y, _fiber(F, 0, x)))


def _ratio(dx, dy):
    if dy == INF or dy == 0:
        return None
    if dx == INF:
        return INF
    return dx / dy


def metric_regularity_bounds(F: PolyOperator, p, W: Window, grid: int = 8,
                             schedule: WindowSchedule = DEFAULT_SCHEDULE) -> RegBounds:
    """Lower bound from an exact rational grid over W; upper bound 1/kappa when SMR holds."""
    if F.n != 1:
        raise GeometryError("metric regularity bounds are implemented for n = 1 only")
    p = as_point(p)
    xbar, ybar = W.center
    lower_sq, arg = Fraction(0), None
    xs = [xbar + W.rx * i / grid for i in range(-grid, grid + 1)]
    ys = [ybar + W.ry * j / grid for j in range(-grid, grid + 1)]
    images = {x: _fiber(F, 0, x) for x in xs}
    preimages = {y: _fiber(F, 1, y) for y in ys}
    for x in xs:
        for y in ys:
            q = _ratio(_interval_dist_sq(x, preimages[y]), _interval_dist_sq(y, images[x]))
            if q is not None and q > lower_sq:
                lower_sq, arg = q, (x, y)
    upper_sq = INF
    detail = {"argmax": arg}
    smr, _ = strongly_metrically_regular(F, p, schedule)
    if smr.holds:
        k_lo, _ = sup_lower_definite_kappa(cones_around(F, p, BOULIGAND, schedule))
        detail["kappa_star"] = k_lo
        if k_lo is not None and k_lo > 0:
            upper_sq = 1 / (k_lo * k_lo)
    return RegBounds(lower_sq, upper_sq, W, detail)
