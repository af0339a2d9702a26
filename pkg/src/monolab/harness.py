"""Built-in corpus, equivalence checks between predicate families, and seeded fuzzers."""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction as Fr
from functools import lru_cache
from typing import Any, Callable

from .definiteness import lower_definite, shift_cone
from .derivative import BOULIGAND, STRICT, lower_definite_around, lower_definite_on
from .geometry import INF, ConeUnion, Polyhedron, Window, as_point
from .monotonicity import (
    local_monotone,
    locally_maximal_hypomonotone,
    locally_maximal_monotone,
    metric_regularity_bounds,
    strongly_locally_maximal_monotone,
    strongly_metrically_regular,
    strongly_metrically_subregular,
    sup_lower_definite_kappa,
)
from .operator import (
    DEFAULT_SCHEDULE,
    PolyOperator,
    WindowSchedule,
    inner_semicontinuous_at,
    locally_closed_at,
    shift,
    shift_point,
    stabilized_window,
)
from .subdiff import (
    Piece,
    PwFunction1D,
    gradient_lower_definite,
    locally_kappa_convex,
    variationally_convex,
)
from .verdict import Verdict, jsonify

REFERENCE, TRIVIAL, DERIVED = "reference", "trivial", "derived"


class CorpusMismatch(AssertionError):
    """A reference-tagged expectation disagreed with the computed verdict."""


@dataclass(frozen=True)
class Expectation:
    predicate: str
    args: tuple
    value: bool
    provenance: str
    anchor: str = ""


@dataclass
class CorpusCase:
    name: str
    payload: Any
    anchor: tuple
    expected: list = field(default_factory=list)

    @property
    def is_function(self) -> bool:
        return isinstance(self.payload, PwFunction1D)


# -- predicate registry ---------------------------------------------------

def _pointwise_mr(F, p, kappa=1, radius=1, grid=8):
    b = metric_regularity_bounds(F, p, Window.square(p, Fr(radius)), grid)
    k = Fr(kappa)
    holds = b.lower_sq != INF and b.lower_sq * k * k <= 1
    return Verdict(holds, "pointwise_mr_inequality", {"bounds": b})


def _radius_half_strict(F, p, kappa):
    return lower_definite_on(F, Window.square(p, Fr(1, 2)), kappa, STRICT)


OPERATOR_PREDICATES: dict[str, Callable] = {
    "local_monotone": lambda F, p, kappa=0, radius=Fr(1, 2): local_monotone(F, Window.square(p, Fr(radius)), kappa),
    "strong_local_monotone": lambda F, p, kappa, radius=Fr(1, 2): local_monotone(F, Window.square(p, Fr(radius)), kappa),
    "locally_maximal_monotone": lambda F, p: locally_maximal_monotone(F, p),
    "maximal_monotone_all_windows": lambda F, p: _all_windows(F, p),
    "locally_maximal_hypomonotone": lambda F, p: locally_maximal_hypomonotone(F, p)[0],
    "strongly_locally_maximal_monotone": lambda F, p, kappa: strongly_locally_maximal_monotone(F, p, kappa),
    "smr": lambda F, p: strongly_metrically_regular(F, p)[0],
    "smsr": lambda F, p: strongly_metrically_subregular(F, p)[0],
    "liminf": lambda F, p: inner_semicontinuous_at(F, p[1], p[0]),
    "DF_lower_definite": lambda F, p, kappa: lower_definite_around(F, p, kappa, BOULIGAND),
    "strict_derivative_lower_definite": lambda F, p, kappa: lower_definite_around(F, p, kappa, STRICT),
    "strict_derivative_lower_definite_half": _radius_half_strict,
    "pointwise_mr_inequality": _pointwise_mr,
}

FUNCTION_PREDICATES: dict[str, Callable] = {
    "variationally_convex": lambda f, p, kappa: variationally_convex(f, p[0], p[1], kappa),
    "locally_kappa_convex": lambda f, p, kappa: locally_kappa_convex(f, p[0], kappa),
    "gradient_lower_definite": lambda f, p, kappa: gradient_lower_definite(f, p[0], kappa),
}


def _all_windows(F, p):
    v = locally_maximal_monotone(F, p, all_windows=True)
    per = v.certificate["per_window"]
    return Verdict(all(per.values()), "maximal_monotone_all_windows", {"per_window": per})


def evaluate(case: CorpusCase, e: Expectation) -> Verdict:
    table = FUNCTION_PREDICATES if case.is_function else OPERATOR_PREDICATES
    return table[e.predicate](case.payload, case.anchor, **dict(e.args))


# -- corpus ---------------------------------------------------------------

def _op(name, pieces):
    return PolyOperator.from_pieces(1, pieces, name)


def gapped_diagonal() -> PolyOperator:
    return _op("gapped_diagonal", [Polyhedron.ray((0, 0), (-1, -1)), Polyhedron.ray((0, 1), (1, 1))])


def diagonal_with_steep_ray() -> PolyOperator:
    return _op("diagonal_with_steep_ray", [Polyhedron.line((0, 0), (1, 1)), Polyhedron.ray((0, 0), (1, 2))])


def zero_map() -> PolyOperator:
    return _op("zero_map", [Polyhedron.line((0, 0), (1, 0))])


def identity() -> PolyOperator:
    return _op("identity", [Polyhedron.line((0, 0), (1, 1))])


def affine_slope_2() -> PolyOperator:
    return _op("affine_slope_2", [Polyhedron.line((0, 0), (1, 2))])


def _pw(name, *pieces, pv=None):
    return PwFunction1D(tuple(Piece(lo, hi, lc, hc, tuple(Fr(c) for c in co)) for lo, hi, lc, hc, co in pieces),
                        tuple((pv or {}).items()), name)


def square() -> PwFunction1D:
    return PwFunction1D.smooth(Fr(1, 2), name="square")


def neg_square() -> PwFunction1D:
    return PwFunction1D.smooth(-1, name="neg_square")


def abs_fn() -> PwFunction1D:
    return _pw("abs", (-INF, Fr(0), False, True, (0, -1, 0)), (Fr(0), INF, True, False, (0, 1, 0)))


def shelf() -> PwFunction1D:
    return _pw("shelf", (-INF, Fr(0), False, True, (0, 0, 0)), (Fr(0), INF, False, False, (-1, 0, 1)))


def huber_glue() -> PwFunction1D:
    h = Fr(-1, 2)
    return _pw("huber_glue", (-INF, Fr(-1), False, True, (0, -1, h)), (Fr(-1), Fr(1), True, True, (Fr(1, 2), 0, 0)),
               (Fr(1), INF, True, False, (0, 1, h)))


def builtin_corpus() -> list[CorpusCase]:
    E = Expectation
    o = (Fr(0), Fr(0))
    cases = [
        CorpusCase("gapped_diagonal", gapped_diagonal(), o, [
            E("strong_local_monotone", (("kappa", Fr(1)),), True, REFERENCE, "gapped_diagonal: strongly locally monotone"),
            E("locally_maximal_monotone", (), False, REFERENCE, "gapped_diagonal: maximality fails"),
            E("smr", (), False, REFERENCE, "gapped_diagonal: not strongly metrically regular"),
            E("liminf", (), False, DERIVED),
            E("strict_derivative_lower_definite_half", (("kappa", Fr(1)),), True, REFERENCE,
              "gapped_diagonal: strict derivative 1-lower-definite"),
            E("locally_maximal_hypomonotone", (), False, DERIVED),
        ]),
        CorpusCase("diagonal_with_steep_ray", diagonal_with_steep_ray(), o, [
            E("local_monotone", (("kappa", Fr(0)),), False, REFERENCE, "diagonal_with_steep_ray: not locally monotone"),
            E("DF_lower_definite", (("kappa", Fr(1)),), True, REFERENCE, "diagonal_with_steep_ray: DF 1-lower-definite"),
            E("pointwise_mr_inequality", (("kappa", Fr(1)),), True, REFERENCE, "diagonal_with_steep_ray: pointwise inequality"),
            E("smr", (), False, REFERENCE, "diagonal_with_steep_ray: not strongly metrically regular"),
            E("smsr", (), True, DERIVED),
            E("locally_maximal_hypomonotone", (), False, DERIVED),
        ]),
        CorpusCase("zero_map", zero_map(), o, [
            E("maximal_monotone_all_windows", (), True, REFERENCE, "zero_map: maximal monotone"),
            E("DF_lower_definite", (("kappa", Fr(0)),), True, REFERENCE, "zero_map: DF 0-lower-definite"),
            E("liminf", (), False, REFERENCE, "zero_map: (d) fails"),
            E("smr", (), False, REFERENCE, "zero_map: not strongly metrically regular"),
            E("smsr", (), False, REFERENCE, "zero_map: isolation fails"),
        ]),
        CorpusCase("identity", identity(), o, [
            E("locally_maximal_monotone", (), True, TRIVIAL),
            E("strongly_locally_maximal_monotone", (("kappa", Fr(1)),), True, TRIVIAL),
            E("smr", (), True, TRIVIAL),
            E("smsr", (), True, TRIVIAL),
            E("locally_maximal_hypomonotone", (), True, TRIVIAL),
        ]),
        CorpusCase("affine_slope_2", affine_slope_2(), o, [
            E("strongly_locally_maximal_monotone", (("kappa", Fr(2)),), True, DERIVED),
            E("strongly_locally_maximal_monotone", (("kappa", Fr(3)),), False, DERIVED),
            E("smr", (), True, TRIVIAL),
        ]),
        CorpusCase("square", square(), o, [
            E("variationally_convex", (("kappa", Fr(1)),), True, TRIVIAL),
            E("locally_kappa_convex", (("kappa", Fr(1)),), True, TRIVIAL),
            E("gradient_lower_definite", (("kappa", Fr(1)),), True, TRIVIAL),
        ]),
        CorpusCase("neg_square", neg_square(), o, [
            E("variationally_convex", (("kappa", Fr(-2)),), True, DERIVED),
            E("variationally_convex", (("kappa", Fr(-1)),), False, DERIVED),
            E("locally_kappa_convex", (("kappa", Fr(-2)),), True, TRIVIAL),
        ]),
        CorpusCase("abs", abs_fn(), o, [
            E("variationally_convex", (("kappa", Fr(0)),), True, TRIVIAL),
        ]),
        CorpusCase("shelf", shelf(), o, [
            E("variationally_convex", (("kappa", Fr(0)),), True, DERIVED),
        ]),
        CorpusCase("huber_glue", huber_glue(), o, [
            E("locally_kappa_convex", (("kappa", Fr(0)),), True, DERIVED),
            E("locally_kappa_convex", (("kappa", Fr(1, 2)),), True, DERIVED),
            E("gradient_lower_definite", (("kappa", Fr(1, 2)),), True, DERIVED),
            E("variationally_convex", (("kappa", Fr(1, 2)),), True, DERIVED),
        ]),
    ]
    return sorted(cases, key=lambda c: c.name)


def _case_report(case: CorpusCase) -> dict:
    rows = []
    for e in case.expected:
        v = evaluate(case, e)
        rows.append({"predicate": e.predicate, "args": {k: v_ for k, v_ in e.args}, "expected": e.value,
                     "got": v.holds, "provenance": e.provenance, "anchor": e.anchor, "verdict": v})
    return {"case": case.name, "results": rows, "agreement": all(r["expected"] == r["got"] for r in rows)}


def run_corpus(cases: list[CorpusCase] | None = None) -> dict:
    """Evaluate every expectation; raises CorpusMismatch on a reference-tagged disagreement."""
    cases = sorted(cases if cases is not None else builtin_corpus(), key=lambda c: c.name)
    reports = parallel_map(_case_report, cases)
    for rep in reports:
        for r in rep["results"]:
            if r["provenance"] == REFERENCE and r["expected"] != r["got"]:
                raise CorpusMismatch(f"{rep['case']}: {r['predicate']} expected {r['expected']}, got {r['got']}")
    return {"cases": reports, "agreement": all(r["agreement"] for r in reports)}


# -- predicate vectors ----------------------------------------------------

def _conj(name: str, parts: dict) -> Verdict:
    holds = all(v.holds for v in parts.values())
    return Verdict(holds, name, {k: v for k, v in parts.items()})


@dataclass
class PredicateVector:
    a: Verdict
    b: Verdict
    c: Verdict
    d: Verdict
    kappa: Fr
    radius: Fr
    case: str = ""
    anchor: tuple = ()

    @property
    def values(self) -> tuple:
        return (self.a.holds, self.b.holds, self.c.holds, self.d.holds)

    @property
    def agreement(self) -> bool:
        return len(set(self.values)) == 1

    def to_json(self) -> dict:
        return {"case": self.case, "anchor": self.anchor, "kappa": self.kappa, "radius": self.radius,
                "predicates": {k: getattr(self, k) for k in "abcd"}, "agreement": self.agreement}


@lru_cache(maxsize=1024)
def _kappa_free(F: PolyOperator, p: tuple, schedule: WindowSchedule):
    """Conjuncts that do not depend on kappa, shared across a kappa sweep (treat as read-only)."""
    return (locally_maximal_hypomonotone(F, p, schedule)[0], strongly_metrically_regular(F, p, schedule)[0],
            locally_closed_at(F, p), inner_semicontinuous_at(F, p[1], p[0], schedule))


def equivalence_predicates(F: PolyOperator, p, kappa, schedule: WindowSchedule = DEFAULT_SCHEDULE) -> PredicateVector:
    kappa = Fr(kappa)
    if kappa <= 0:
        raise ValueError("kappa must be positive; use shifted_maximality_check for kappa <= 0")
    if F.n != 1:
        raise ValueError("only n = 1 is supported")
    p = as_point(p)
    W, _, _ = stabilized_window(F, p, schedule)
    hypo, smr, closed, isc = _kappa_free(F, p, schedule)
    df = lower_definite_around(F, p, kappa, BOULIGAND, schedule)
    a = strongly_locally_maximal_monotone(F, p, kappa, schedule)
    b = _conj("b", {"DF_lower_definite": df, "maximal_hypomonotone": hypo})
    c = _conj("c", {"DF_lower_definite": df, "smr": smr})
    d = _conj("d", {"strict_lower_definite": lower_definite_around(F, p, kappa, STRICT, schedule),
                    "locally_closed": closed, "inner_semicontinuous": isc})
    return PredicateVector(a, b, c, d, kappa, W.rx, F.name, p)


def shifted_maximality_check(F: PolyOperator, p, kappa, schedule: WindowSchedule = DEFAULT_SCHEDULE) -> dict:
    """Two-sided check: maximality of F - kappa Id versus DF lower-definiteness plus maximal hypomonotonicity."""
    kappa = Fr(kappa)
    p = as_point(p)
    lhs = locally_maximal_monotone(shift(F, -kappa), shift_point(p, -kappa), schedule)
    rhs = _conj("rhs", {"DF_lower_definite": lower_definite_around(F, p, kappa, BOULIGAND, schedule),
                        "maximal_hypomonotone": locally_maximal_hypomonotone(F, p, schedule)[0]})
    return {"case": F.name, "anchor": p, "kappa": kappa, "shifted_maximal": lhs, "rhs": rhs,
            "agreement": lhs.holds == rhs.holds}


def assert_equivalences(vectors: list) -> dict:
    """Report of all vectors whose four verdicts disagree, with full payloads for reproduction."""
    failures = []
    for v in vectors:
        if not v.agreement:
            names = "".join(k for k in "abcd" if getattr(v, k).holds)
            failures.append({"vector": v, "discrepancy": f"true: {names or '-'}; false: "
                             + "".join(k for k in "abcd" if not getattr(v, k).holds)})
    return {"passed": not failures, "checked": len(vectors), "violations": failures}


# -- fuzzers --------------------------------------------------------------

SLOPES = [Fr(-2), Fr(-1), Fr(-1, 2), Fr(0), Fr(1, 2), Fr(1), Fr(2), Fr(3)]
MONO_SLOPES = [Fr(0), Fr(1, 2), Fr(1), Fr(2), Fr(3)]
JUMPS = [Fr(-1), Fr(-1, 2), Fr(1, 2), Fr(1)]


@dataclass
class FuzzCase:
    operator: PolyOperator
    anchors: list
    gap_anchor: tuple | None = None
    params: dict = field(default_factory=dict)


def _fuzz_one(rng: random.Random, idx: int, params: dict) -> FuzzCase:
    mono = params.get("force_monotone", False)
    gap = params.get("mutate_gap", False)
    extra = params.get("mutate_extra", not mono) and not mono
    m = rng.randint(1, 3)
    xs = sorted(rng.sample(range(-6, 7), m))
    xs = [Fr(x, 4) for x in xs]
    slopes = [rng.choice(MONO_SLOPES if mono else SLOPES) for _ in range(m + 1)]
    y = Fr(rng.randint(-4, 4), 4)
    pieces, anchors, gap_anchor = [], [], None
    gap_at = rng.randrange(m) if gap else None
    ys_left = []
    for i, x in enumerate(xs):
        left_y = y
        anchors.append((x, left_y))
        jump = Fr(0)
        if rng.random() < 0.3 or i == gap_at:
            jump = rng.choice([j for j in JUMPS if j > 0] if (mono or i == gap_at) else JUMPS)
        right_y = left_y + jump
        if jump and i != gap_at:
            pieces.append(Polyhedron.segment((x, left_y), (x, right_y)))
        if i == gap_at:
            gap_anchor = (x, left_y)
        ys_left.append((left_y, right_y))
        if i + 1 < m:
            y = right_y + slopes[i + 1] * (xs[i + 1] - x)
            pieces.append(Polyhedron.segment((x, right_y), (xs[i + 1], y)))
            anchors.append(((x + xs[i + 1]) / 2, (right_y + y) / 2))
        else:
            pieces.append(Polyhedron.ray((x, right_y), (1, slopes[m])))
            anchors.append((x + Fr(1, 4), right_y + slopes[m] / 4))
    y0 = ys_left[0][0]
    pieces.append(Polyhedron.ray((xs[0], y0), (-1, -slopes[0])))
    anchors.append((xs[0] - Fr(1, 4), y0 - slopes[0] / 4))
    if extra and rng.random() < 0.25:
        k = rng.randrange(m)
        pt = (xs[k], ys_left[k][1] + Fr(1, 2))
        pieces.append(Polyhedron.point(pt))
        anchors.append(pt)
    if extra and rng.random() < 0.25:
        k = rng.randrange(m)
        s = rng.choice(SLOPES)
        pieces.append(Polyhedron.ray((xs[k], ys_left[k][1]), (1, s)))
    anchors = sorted(set(anchors))
    if gap_anchor is not None:
        anchors = [gap_anchor] + [a for a in anchors if a != gap_anchor]
    F = PolyOperator.from_pieces(1, pieces, f"fuzz_{idx}")
    return FuzzCase(F, [as_point(a) for a in anchors], gap_anchor and as_point(gap_anchor), dict(params))


def fuzz_cases(seed: int, count: int, params: dict | None = None) -> list[FuzzCase]:
    rng = random.Random(seed)
    return [_fuzz_one(rng, i, params or {}) for i in range(count)]


def fuzz_operators(seed: int, count: int, params: dict | None = None) -> list[PolyOperator]:
    return [c.operator for c in fuzz_cases(seed, count, params)]


def fuzz_cones(seed: int, count: int, n: int = 1) -> list[ConeUnion]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        pieces = []
        for _ in range(rng.randint(1, 3)):
            gens = []
            for _ in range(rng.randint(1, 3)):
                g = tuple(Fr(rng.randint(-3, 3)) for _ in range(2 * n))
                if any(g):
                    gens.append(g)
            if gens:
                pieces.append(Polyhedron.cone(gens, 2 * n))
        out.append(ConeUnion(2 * n, tuple(pieces)))
    return out


def sup_kappa(cones, lo=Fr(-2**10), hi=Fr(2**10), step=Fr(1, 2**20)):
    return sup_lower_definite_kappa(cones, lo, hi, step)


def shift_law_holds(K: ConeUnion, kappa, gamma) -> bool:
    return lower_definite(K, kappa).holds == lower_definite(shift_cone(K, gamma), Fr(kappa) + Fr(gamma)).holds


# -- parallel helpers -----------------------------------------------------

def threads() -> int:
    try:
        return max(1, int(os.environ.get("MONOLAB_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    items = list(items)
    k = threads()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


def _vec_job(args):
    F, p, kappa = args
    return equivalence_predicates(F, p, kappa)


def equivalence_fuzz(seed: int, count: int, kappas=(Fr(1, 4), Fr(1, 2), Fr(1)), anchors_per_case: int = 1,
                   params: dict | None = None) -> list[PredicateVector]:
    jobs = []
    for c in fuzz_cases(seed, count, params):
        for p in c.anchors[:anchors_per_case]:
            for k in kappas:
                jobs.append((c.operator, p, k))
    return parallel_map(_vec_job, jobs)


def report_json(obj) -> Any:
    return jsonify(obj)
