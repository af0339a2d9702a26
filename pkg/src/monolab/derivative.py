"""Graphical and strict graphical derivatives as cones of the graph."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .definiteness import lower_definite
from .geometry import ConeUnion, PolyUnion, Window, as_point, paratingent_cone, tangent_cone
from .operator import DEFAULT_SCHEDULE, PolyOperator, WindowSchedule, graph_reps, stabilized_window
from .verdict import Verdict

BOULIGAND = "bouligand"
STRICT = "strict"
F_ATTENTIVE = "f_attentive"


@dataclass(frozen=True)
class DerivativeCone:
    base: tuple
    kind: str
    cone: ConeUnion

    @property
    def n(self) -> int:
        return self.cone.dim // 2

    def to_json(self) -> dict:
        pieces = []
        for P in self.cone.pieces:
            _, rays = P.vrep()
            pieces.append({"rays": [[str(c) for c in r] for r in rays]})
        return {"base": [str(c) for c in self.base], "kind": self.kind, "pieces": pieces}


@lru_cache(maxsize=4096)
def _tangent(graph: PolyUnion, p: tuple) -> ConeUnion:
    return tangent_cone(graph, p)


@lru_cache(maxsize=4096)
def _paratingent(graph: PolyUnion, p: tuple) -> ConeUnion:
    return paratingent_cone(graph, p)


def graphical_derivative(F: PolyOperator, p) -> DerivativeCone:
    p = as_point(p)
    return DerivativeCone(p, BOULIGAND, _tangent(F.graph, p))


def strict_graphical_derivative(F: PolyOperator, p) -> DerivativeCone:
    p = as_point(p)
    return DerivativeCone(p, STRICT, _paratingent(F.graph, p))


def slice(D: DerivativeCone, u) -> PolyUnion:
    """{v : (u, v) in cone}."""
    u = as_point(u if isinstance(u, (tuple, list)) else (u,))
    n = D.n
    return PolyUnion(n, tuple(P.slice({i: u[i] for i in range(n)}) for P in D.cone.pieces))


def _derivative(F: PolyOperator, p, kind: str) -> DerivativeCone:
    return strict_graphical_derivative(F, p) if kind == STRICT else graphical_derivative(F, p)


def lower_definite_on(F: PolyOperator, W: Window, kappa, kind: str = BOULIGAND) -> Verdict:
    """kappa-lower-definiteness of DF (or D*F) at every graph point in the open window W."""
    kappa = Fraction(kappa)
    points = graph_reps(F, W)
    for z in points:
        dv = lower_definite(_derivative(F, z, kind).cone, kappa)
        if not dv.holds:
            return Verdict(False, f"{kind}_lower_definite", {"points_checked": len(points)},
                           witness={"point": z, "direction": dv.witness}, window=W)
    return Verdict(True, f"{kind}_lower_definite", {"points_checked": len(points), "points": points}, window=W)


def lower_definite_around(F: PolyOperator, p, kappa, kind: str = BOULIGAND,
                          schedule: WindowSchedule = DEFAULT_SCHEDULE) -> Verdict:
    """Lower-definiteness on the stabilized window around p (constant for all smaller windows)."""
    W, stable, _ = stabilized_window(F, p, schedule)
    v = lower_definite_on(F, W, kappa, kind)
    v.stabilized = stable
    return v
