"""Piecewise-quadratic functions on R: subdifferentials and second-order variational properties."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .definiteness import lower_definite
from .derivative import F_ATTENTIVE, DerivativeCone, lower_definite_around
from .geometry import INF, SHRINK, ConeUnion, GeometryError, Polyhedron, PolyUnion, Window, as_point
from .monotonicity import _rational_sqrt_down, _rational_sqrt_up, min_quadratic_over_polytope
from .operator import PolyOperator
from .verdict import InputError, Verdict, parse_rat

EPS_LADDER = [Fraction(1, 2**k) for k in range(1, 13)]
SIGMA_LADDER = [Fraction(2**k) for k in range(0, 13)]


class NotC1Error(ValueError):
    pass


def _parse_end(s, what):
    t = str(s).strip().lower()
    if t in ("inf", "+inf"):
        return INF
    if t == "-inf":
        return -INF
    return parse_rat(s, what)


@dataclass(frozen=True)
class Piece:
    lo: Fraction | float
    hi: Fraction | float
    lo_closed: bool
    hi_closed: bool
    coeffs: tuple  # (a2, a1, a0)

    def value(self, x) -> Fraction:
        a2, a1, a0 = self.coeffs
        return a2 * x * x + a1 * x + a0

    def slope(self, x) -> Fraction:
        a2, a1, _ = self.coeffs
        return 2 * a2 * x + a1

    def covers(self, x) -> bool:
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def interior(self, x) -> bool:
        return self.lo < x < self.hi


@dataclass(frozen=True)
class PwFunction1D:
    """f(x) = a2 x^2 + a1 x + a0 on each piece; breakpoint values in ``point_values``; +inf off the domain."""

    pieces: tuple
    point_values: tuple = ()  # sorted ((x, f(x)), ...)
    name: str = ""

    def __post_init__(self):
        ps = sorted(self.pieces, key=lambda p: (p.lo, p.hi))
        object.__setattr__(self, "pieces", tuple(ps))
        object.__setattr__(self, "point_values", tuple(sorted(dict(self.point_values).items())))
        for p in ps:
            if not p.lo < p.hi:
                raise InputError(f"piece interval [{p.lo}, {p.hi}] is empty")
            if (p.lo == -INF and p.lo_closed) or (p.hi == INF and p.hi_closed):
                raise InputError("an infinite endpoint cannot be closed")
        for p, q in zip(ps, ps[1:]):
            if q.lo < p.hi:
                raise InputError(f"pieces overlap near x = {q.lo}")
        pv = dict(self.point_values)
        bps = set(self.breakpoints())
        for x in pv:
            if x not in bps:
                raise InputError(f"point value at {x} is not a breakpoint")
        for b in self.breakpoints():
            closed_vals = {p.value(b) for p in ps if p.covers(b)}
            if b in pv:
                if closed_vals and closed_vals != {pv[b]}:
                    raise InputError(f"point value at breakpoint {b} disagrees with a closed piece")
            elif len(closed_vals) > 1:
                raise InputError(f"closed pieces disagree at breakpoint {b}")
            v = self.value(b)
            if any(b in (p.lo, p.hi) and v > p.value(b) for p in ps):
                raise InputError(f"not lower semicontinuous at breakpoint {b}")

    # -- construction ---------------------------------------------------
    @classmethod
    def from_json(cls, obj: dict, name: str = "") -> "PwFunction1D":
        if not isinstance(obj, dict) or "pieces" not in obj:
            raise InputError("function: missing field 'pieces'")
        pieces = []
        for k, pc in enumerate(obj["pieces"]):
            where = f"pieces[{k}]"
            try:
                lo, hi = pc["interval"]
                lc, hc = pc.get("closed", [True, True])
                coeffs = pc["coeffs"]
            except (KeyError, TypeError, ValueError):
                raise InputError(f"{where}: expected interval, closed and coeffs") from None
            if len(coeffs) != 3:
                raise InputError(f"{where}.coeffs: expected three coefficients")
            lo, hi = _parse_end(lo, f"{where}.interval"), _parse_end(hi, f"{where}.interval")
            pieces.append(Piece(lo, hi, bool(lc) and lo != -INF, bool(hc) and hi != INF,
                                tuple(parse_rat(c, f"{where}.coeffs") for c in coeffs)))
        pv = {parse_rat(k, "point_values key"): parse_rat(v, f"point_values[{k}]")
              for k, v in obj.get("point_values", {}).items()}
        return cls(tuple(pieces), tuple(pv.items()), name or obj.get("name", ""))

    def to_json(self) -> dict:
        def end(v):
            return str(v) if isinstance(v, Fraction) else ("inf" if v > 0 else "-inf")
        return {
            "pieces": [{"interval": [end(p.lo), end(p.hi)], "closed": [p.lo_closed, p.hi_closed],
                        "coeffs": [str(c) for c in p.coeffs]} for p in self.pieces],
            "point_values": {str(x): str(v) for x, v in self.point_values},
        }

    @classmethod
    def smooth(cls, a2, a1=0, a0=0, name: str = "") -> "PwFunction1D":
        return cls((Piece(-INF, INF, False, False, tuple(Fraction(c) for c in (a2, a1, a0))),), (), name)

    def add_quadratic(self, c, center=0) -> "PwFunction1D":
        """f + c (x - center)^2."""
        c, m = Fraction(c), Fraction(center)
        ps = tuple(Piece(p.lo, p.hi, p.lo_closed, p.hi_closed,
                         (p.coeffs[0] + c, p.coeffs[1] - 2 * c * m, p.coeffs[2] + c * m * m)) for p in self.pieces)
        pv = tuple((x, v + c * (x - m) ** 2) for x, v in self.point_values)
        return PwFunction1D(ps, pv, self.name)

    # -- evaluation -----------------------------------------------------
    def breakpoints(self) -> list:
        bps = {x for x, _ in self.point_values}
        for p in self.pieces:
            bps.update(e for e in (p.lo, p.hi) if e not in (INF, -INF))
        return sorted(bps)

    def value(self, x):
        x = Fraction(x)
        pv = dict(self.point_values)
        if x in pv:
            return pv[x]
        for p in self.pieces:
            if p.covers(x):
                return p.value(x)
        return INF

    def in_domain(self, x) -> bool:
        return self.value(x) != INF

    def sides(self, x):
        """(left piece, right piece) adjacent to x; the same piece twice when x is interior."""
        left = right = None
        for p in self.pieces:
            if p.interior(x):
                return p, p
            if p.hi == x:
                left = p
            if p.lo == x:
                right = p
        return left, right

    def is_c1_at(self, x) -> bool:
        left, right = self.sides(x)
        if left is None or right is None:
            return False
        v = self.value(x)
        return left.value(x) == v == right.value(x) and left.slope(x) == right.slope(x)


# -- subdifferentials -----------------------------------------------------

def _interval_1d(lo, hi) -> Polyhedron:
    ineqs = []
    if hi != INF:
        ineqs.append(((Fraction(1),), Fraction(hi)))
    if lo != -INF:
        ineqs.append(((Fraction(-1),), -Fraction(lo)))
    return Polyhedron(1, tuple(ineqs))


def _check_dom(f: PwFunction1D, x):
    if not f.in_domain(x):
        raise GeometryError(f"x = {x} is outside the domain")


def _proximal_bounds(f: PwFunction1D, x):
    x = Fraction(x)
    _check_dom(f, x)
    left, right = f.sides(x)
    if left is right and left is not None:
        s = left.slope(x)
        return s, s
    v = f.value(x)
    lo = left.slope(x) if left is not None and left.value(x) == v else -INF
    hi = right.slope(x) if right is not None and right.value(x) == v else INF
    return lo, hi


def proximal_subdifferential(f: PwFunction1D, x) -> PolyUnion:
    lo, hi = _proximal_bounds(f, x)
    return PolyUnion(1, (_interval_1d(lo, hi),) if lo <= hi else ())


def limiting_subdifferential(f: PwFunction1D, x) -> PolyUnion:
    x = Fraction(x)
    lo, hi = _proximal_bounds(f, x)
    pieces = [_interval_1d(lo, hi)] if lo <= hi else []
    left, right = f.sides(x)
    v = f.value(x)
    for side in (left, right):
        if side is not None and side.value(x) == v:
            d = side.slope(x)
            if not (lo <= d <= hi):
                pieces.append(_interval_1d(d, d))
    return PolyUnion(1, tuple(pieces)).dedup()


def interval_bounds(U: PolyUnion) -> list[tuple]:
    """(lo, hi) per piece of a union of intervals in R, with infinite ends for rays."""
    out = []
    for P in U.pieces:
        verts, rays = P.vrep()
        xs = [v[0] for v in verts]
        lo, hi = min(xs), max(xs)
        for (r,) in rays:
            if r > 0:
                hi = INF
            else:
                lo = -INF
        out.append((lo, hi))
    return sorted(out)


@dataclass(frozen=True)
class Trace:
    """f along a graph piece, as a quadratic in x, and the x-values the piece omits."""

    coeffs: tuple
    open_ends: frozenset = frozenset()

    def value(self, x):
        a2, a1, a0 = self.coeffs
        return a2 * x * x + a1 * x + a0


@dataclass(frozen=True)
class SubdiffGraph:
    f: PwFunction1D
    pieces: tuple  # ((Polyhedron in R^2, Trace), ...)

    @property
    def operator(self) -> PolyOperator:
        """Closure of gph of the subdifferential as a polyhedral operator."""
        return PolyOperator.from_pieces(1, [P for P, _ in self.pieces], self.f.name)

    def contains(self, p) -> bool:
        p = as_point(p)
        return any(P.contains(p) and p[0] not in t.open_ends for P, t in self.pieces)

    def to_json(self) -> dict:
        return {"pieces": [{"hrep": P.to_json(), "f_trace": [str(c) for c in t.coeffs],
                            "open_ends": sorted(str(x) for x in t.open_ends)} for P, t in self.pieces]}


def _graph_piece(p: Piece) -> Polyhedron:
    a2, a1, _ = p.coeffs
    ineqs = []
    if p.hi != INF:
        ineqs.append(((Fraction(1), Fraction(0)), Fraction(p.hi)))
    if p.lo != -INF:
        ineqs.append(((Fraction(-1), Fraction(0)), -Fraction(p.lo)))
    return Polyhedron(2, tuple(ineqs), (((-2 * a2, Fraction(1)), a1),))


def _vertical(b, lo, hi) -> Polyhedron:
    ineqs = []
    if hi != INF:
        ineqs.append(((Fraction(0), Fraction(1)), Fraction(hi)))
    if lo != -INF:
        ineqs.append(((Fraction(0), Fraction(-1)), -Fraction(lo)))
    return Polyhedron(2, tuple(ineqs), (((Fraction(1), Fraction(0)), Fraction(b)),))


def subdiff_graph(f: PwFunction1D, W: Window | None = None) -> SubdiffGraph:
    out = []
    for p in f.pieces:
        opens = set()
        for b in (p.lo, p.hi):
            if b in (INF, -INF):
                continue
            if not f.in_domain(b) or not limiting_subdifferential(f, b).contains((p.slope(b),)):
                opens.add(b)
        out.append((_graph_piece(p), Trace(p.coeffs, frozenset(opens))))
    for b in f.breakpoints():
        if not f.in_domain(b):
            continue
        lo, hi = _proximal_bounds(f, b)
        if lo <= hi:
            out.append((_vertical(b, lo, hi), Trace((Fraction(0), Fraction(0), f.value(b)))))
    if W is not None:
        B = W.box()
        out = [(P.intersect(B), t) for P, t in out]
    return SubdiffGraph(f, tuple((P, t) for P, t in out if not P.is_empty()))


# -- f-attentive constructions ------------------------------------------

def _quad_le(coeffs, c, lo, hi):
    """Closed intervals in [lo, hi] where a2 x^2 + a1 x + a0 <= c (inner rational approximation)."""
    a2, a1, a0 = coeffs
    a0 = a0 - c
    if a2 == 0:
        if a1 == 0:
            ivs = [(-INF, INF)] if a0 <= 0 else []
        elif a1 > 0:
            ivs = [(-INF, -a0 / a1)]
        else:
            ivs = [(-a0 / a1, INF)]
    else:
        D = a1 * a1 - 4 * a2 * a0
        m = -a1 / (2 * a2)
        if D < 0:
            ivs = [] if a2 > 0 else [(-INF, INF)]
        elif a2 > 0:
            h = _rational_sqrt_down(D) / (2 * a2)
            ivs = [(m - h, m + h)]
        else:
            h = _rational_sqrt_up(D) / (-2 * a2) if D else Fraction(0)
            ivs = [(-INF, m - h), (m + h, INF)] if D else [(-INF, INF)]
    out = []
    for l, u in ivs:
        l, u = max(l, lo), min(u, hi)
        if l <= u:
            out.append((l, u))
    return out


def _intersect_ivs(A, B):
    out = []
    for l1, u1 in A:
        for l2, u2 in B:
            l, u = max(l1, l2), min(u1, u2)
            if l <= u:
                out.append((l, u))
    return out


def _x_range(P: Polyhedron):
    verts, rays = P.vrep()
    lo, hi = min(v[0] for v in verts), max(v[0] for v in verts)
    for r in rays:
        if r[0] > 0:
            hi = INF
        if r[0] < 0:
            lo = -INF
    return lo, hi


def _strip(P: Polyhedron, lo, hi) -> Polyhedron:
    ineqs = []
    if hi != INF:
        ineqs.append(((Fraction(1), Fraction(0)), Fraction(hi)))
    if lo != -INF:
        ineqs.append(((Fraction(-1), Fraction(0)), -Fraction(lo)))
    return P.intersect(Polyhedron(2, tuple(ineqs)))


def _attentive_pieces(f: PwFunction1D, x0, y0, eps, two_sided: bool):
    x0, y0, eps = Fraction(x0), Fraction(y0), Fraction(eps)
    if not limiting_subdifferential(f, x0).contains((y0,)):
        raise GeometryError(f"{y0} is not a subgradient at {x0}")
    G = subdiff_graph(f, Window.square((x0, y0), eps * SHRINK))
    f0 = f.value(x0)
    top = f0 + eps * SHRINK
    out = []
    for P, t in G.pieces:
        lo, hi = _x_range(P)
        ivs = _quad_le(t.coeffs, top, lo, hi)
        if two_sided:
            neg = tuple(-c for c in t.coeffs)
            ivs = _intersect_ivs(ivs, _quad_le(neg, -(f0 - eps * SHRINK), lo, hi))
        for l, u in ivs:
            Q = _strip(P, l, u)
            if not Q.is_empty():
                out.append((Q, t))
    return out


def attentive_localization(f: PwFunction1D, x0, y0, eps) -> PolyOperator:
    """gph of the subdifferential near (x0, y0) restricted to f(x) < f(x0) + eps (closed inner version)."""
    pieces = _attentive_pieces(f, x0, y0, eps, two_sided=False)
    return PolyOperator.from_pieces(1, [P for P, _ in pieces], f.name)


def attentive_graphical_derivative(f: PwFunction1D, p, G: SubdiffGraph | None = None) -> DerivativeCone:
    """Tangent directions along graph pieces whose f-trace is continuous at p."""
    p = as_point(p)
    G = G or subdiff_graph(f)
    if not G.contains(p):
        raise GeometryError("point is not on the subdifferential graph")
    fx = f.value(p[0])
    cones = [P.tangent_cone(p) for P, t in G.pieces
             if P.contains(p) and p[0] not in t.open_ends and t.value(p[0]) == fx]
    return DerivativeCone(p, F_ATTENTIVE, ConeUnion(2, tuple(cones)).dedup())


# -- prox-regularity ------------------------------------------------------

def _residual_min(gpiece: Polyhedron, trace: Trace, xp_coeffs, xp_lo, xp_hi, sigma):
    """min over (x,y) in gpiece, x' in [xp_lo, xp_hi] of f(x') - f(x) - y(x'-x) + sigma/2 (x'-x)^2."""
    a2, a1, a0 = trace.coeffs
    b2, b1, b0 = xp_coeffs
    s = Fraction(sigma)
    Q = [[-a2 + s / 2, Fraction(1, 2), -s / 2],
         [Fraction(1, 2), Fraction(0), Fraction(-1, 2)],
         [-s / 2, Fraction(-1, 2), b2 + s / 2]]
    c = [-a1, Fraction(0), b1]
    ineqs = tuple((a + (Fraction(0),), b) for a, b in gpiece.ineqs)
    ineqs += (((Fraction(0),) * 2 + (Fraction(1),), xp_hi), ((Fraction(0),) * 2 + (Fraction(-1),), -xp_lo))
    eqs = tuple((e + (Fraction(0),), v) for e, v in gpiece.eqs)
    val, _ = min_quadratic_over_polytope(Q, c, Polyhedron(3, ineqs, eqs))
    return val + b0 - a0


def _prox_check(f: PwFunction1D, x0, y0, eps, sigma) -> bool:
    x0 = Fraction(x0)
    pieces = _attentive_pieces(f, x0, y0, eps, two_sided=True)
    r = eps * SHRINK
    blo, bhi = x0 - r, x0 + r
    xp_parts = []
    for p in f.pieces:
        lo, hi = max(p.lo, blo), min(p.hi, bhi)
        if lo <= hi:
            xp_parts.append((p.coeffs, lo, hi))
    for b in f.breakpoints():
        if blo <= b <= bhi and f.in_domain(b):
            xp_parts.append(((Fraction(0), Fraction(0), f.value(b)), b, b))
    for P, t in pieces:
        for coeffs, lo, hi in xp_parts:
            if _residual_min(P, t, coeffs, lo, hi, sigma) < 0:
                return False
    return True


@dataclass
class ProxCert:
    epsilon: Fraction
    sigma: Fraction
    window: Window

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "sigma": self.sigma, "window": self.window}


def prox_regular(f: PwFunction1D, xbar, ybar):
    """(verdict, cert) from a dyadic (eps, sigma) ladder search; failure means the bounded search failed."""
    xbar, ybar = Fraction(xbar), Fraction(ybar)
    smax = SIGMA_LADDER[-1]
    # the residual grows with sigma and the constraint set shrinks with eps
    if not _prox_check(f, xbar, ybar, EPS_LADDER[-1], smax):
        return Verdict(False, "prox_regular", {"search": "bounded ladder exhausted",
                                               "eps_min": EPS_LADDER[-1], "sigma_max": smax},
                       witness={"epsilon": EPS_LADDER[-1], "sigma": smax}), None
    eps = next(e for e in EPS_LADDER if _prox_check(f, xbar, ybar, e, smax))
    sigma = next(s for s in SIGMA_LADDER if _prox_check(f, xbar, ybar, eps, s))
    W = Window.square((xbar, ybar), eps)
    cert = ProxCert(eps, sigma, W)
    return Verdict(True, "prox_regular", {"epsilon": eps, "sigma": sigma}, window=W), cert


# -- variational convexity and local kappa-convexity ---------------------

def _piece_test_points(P: Polyhedron, others) -> list:
    verts, rays = P.vrep()
    marks = set(verts)
    for Q in others:
        I = P.intersect(Q)
        if not I.is_empty():
            marks.update(I.vrep()[0])
    pts = sorted(marks)
    mids = [tuple((a + b) / 2 for a, b in zip(u, v)) for u, v in zip(pts, pts[1:])]
    ends = [tuple(a + b for a, b in zip(pts[-1], r)) for r in rays] if pts else []
    return pts + mids + ends


def attentive_lower_definite(f: PwFunction1D, xbar, ybar, kappa, eps) -> Verdict:
    """kappa-lower-definiteness of the attentive derivative at every point of the attentive window."""
    kappa = Fraction(kappa)
    G = subdiff_graph(f)
    loc = _attentive_pieces(f, xbar, ybar, eps, two_sided=False)
    full = [P for P, _ in G.pieces]
    checked = 0
    for P, _ in loc:
        for z in _piece_test_points(P, full):
            if not G.contains(z) or not P.contains(z):
                continue
            checked += 1
            D = attentive_graphical_derivative(f, z, G)
            dv = lower_definite(D.cone, kappa)
            if not dv.holds:
                return Verdict(False, "attentive_lower_definite", {"points_checked": checked},
                               witness={"point": z, "direction": dv.witness})
    return Verdict(True, "attentive_lower_definite", {"points_checked": checked, "epsilon": eps})


def variationally_convex(f: PwFunction1D, xbar, ybar, kappa) -> Verdict:
    xbar, ybar, kappa = Fraction(xbar), Fraction(ybar), Fraction(kappa)
    pv, cert = prox_regular(f, xbar, ybar)
    if not pv.holds:
        return Verdict(False, "variationally_convex", {"prox_regular": pv}, witness=pv.witness)
    # the attentive set only shrinks with eps, so the smallest ladder rung is decisive
    eps = min(EPS_LADDER[-1], cert.epsilon)
    ld = attentive_lower_definite(f, xbar, ybar, kappa, eps)
    W = Window.square((xbar, ybar), eps)
    return Verdict(ld.holds, "variationally_convex", {"prox_regular": pv, "lower_definite": ld},
                   witness=ld.witness, window=W)


def locally_kappa_convex(f: PwFunction1D, xbar, kappa) -> Verdict:
    """Second-derivative test for a C^1 piecewise quadratic near xbar."""
    xbar, kappa = Fraction(xbar), Fraction(kappa)
    left, right = f.sides(xbar)
    if left is None or right is None:
        raise NotC1Error(f"{xbar} is not an interior point of the domain")
    if left is not right and not f.is_c1_at(xbar):
        raise NotC1Error(f"f is not continuously differentiable at {xbar}")
    curv = sorted({2 * left.coeffs[0], 2 * right.coeffs[0]})
    holds = curv[0] >= kappa
    return Verdict(holds, "locally_kappa_convex", {"second_derivatives": curv},
                   witness=None if holds else {"second_derivative": curv[0]})


def gradient_operator(f: PwFunction1D) -> PolyOperator:
    return subdiff_graph(f).operator


def gradient_lower_definite(f: PwFunction1D, xbar, kappa) -> Verdict:
    """D(grad f) kappa-lower-definite around (xbar, f'(xbar))."""
    xbar = Fraction(xbar)
    left, _ = f.sides(xbar)
    return lower_definite_around(gradient_operator(f), (xbar, left.slope(xbar)), kappa)
