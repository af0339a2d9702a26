"""monolab command-line interface.

Exit codes: 0 success, 1 input error, 2 property or expectation violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import harness
from .derivative import graphical_derivative
from .geometry import GeometryError, PolyUnion
from .operator import PolyOperator, WindowSchedule
from .subdiff import (
    NotC1Error,
    PwFunction1D,
    gradient_lower_definite,
    limiting_subdifferential,
    locally_kappa_convex,
    prox_regular,
    proximal_subdifferential,
    subdiff_graph,
    variationally_convex,
)
from .verdict import InputError, jsonify, parse_rat

OK, BAD_INPUT, VIOLATION = 0, 1, 2


def _point(s: str, what: str = "--point") -> tuple:
    if s is None:
        raise InputError(f"{what}: required")
    return tuple(parse_rat(t, what) for t in s.split(","))


def _load(path: str):
    if path is None:
        raise InputError("--input: required")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"--input: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"--input: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _schedule(args) -> WindowSchedule:
    r0 = parse_rat(args.window_radius, "--window-radius")
    if r0 <= 0:
        raise InputError("--window-radius: must be positive")
    if args.max_refine < 0:
        raise InputError("--max-refine: must be nonnegative")
    return WindowSchedule(r0, args.max_refine)


def _csv_polys(rows, label: str, U: PolyUnion):
    for i, P in enumerate(U.pieces):
        verts, rays = P.vrep()
        for v in verts:
            rows.append([label, i, "vertex", *[str(c) for c in v]])
        for r in rays:
            rows.append([label, i, "ray", *[str(c) for c in r]])


def _emit(args, report: dict, csv_rows=None):
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["object", "piece", "kind", "x", "y"])
        w.writerows(csv_rows or [])
        text = buf.getvalue()
    else:
        text = json.dumps(jsonify(report), sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze_operator(args) -> int:
    F = PolyOperator.from_json(_load(args.input))
    p = _point(args.point)
    if len(p) != 2 * F.n:
        raise InputError(f"--point: expected {2 * F.n} coordinates")
    if not F.contains(p):
        raise InputError("--point: not on the graph")
    kappa = parse_rat(args.kappa, "--kappa")
    schedule = _schedule(args)
    if F.n != 1:
        raise InputError("operator.n: only n = 1 operators can be analyzed")
    if args.corollary:
        if kappa > 0:
            raise InputError("--kappa: corollary mode expects kappa <= 0")
        report = harness.shifted_maximality_check(F, p, kappa, schedule)
        agree = report["agreement"]
    else:
        if kappa <= 0:
            raise InputError("--kappa: must be positive for the four-way check; use --corollary for kappa <= 0")
        vec = harness.equivalence_predicates(F, p, kappa, schedule)
        report = vec.to_json()
        agree = vec.agreement
    rows = []
    _csv_polys(rows, "graph", F.graph)
    _csv_polys(rows, "tangent_cone", graphical_derivative(F, p).cone)
    _emit(args, report, rows)
    return OK if agree else VIOLATION


def cmd_analyze_function(args) -> int:
    f = PwFunction1D.from_json(_load(args.input))
    (x,) = _point(args.point)
    y = parse_rat(args.subgrad, "--subgrad")
    kappa = parse_rat(args.kappa, "--kappa")
    if not f.in_domain(x):
        raise InputError("--point: outside the domain")
    lim = limiting_subdifferential(f, x)
    if not lim.contains((y,)):
        raise InputError("--subgrad: not a limiting subgradient at the point")
    pv, cert = prox_regular(f, x, y)
    vc = variationally_convex(f, x, y, kappa)
    report = {
        "point": x, "subgrad": y, "kappa": kappa,
        "proximal_subdifferential": [P.to_json() for P in proximal_subdifferential(f, x).pieces],
        "limiting_subdifferential": [P.to_json() for P in lim.pieces],
        "prox_regular": pv, "prox_certificate": cert, "variationally_convex": vc,
    }
    status = OK
    if f.is_c1_at(x):
        lk = locally_kappa_convex(f, x, kappa)
        gl = gradient_lower_definite(f, x, kappa)
        report["c1_cross_check"] = {"locally_kappa_convex": lk, "gradient_lower_definite": gl,
                                    "agreement": lk.holds == gl.holds}
        if lk.holds != gl.holds:
            status = VIOLATION
    rows = []
    G = subdiff_graph(f)
    _csv_polys(rows, "subdiff_graph", G.operator.graph)
    _emit(args, report, rows)
    return status


def cmd_corpus(args) -> int:
    try:
        report = harness.run_corpus()
    except harness.CorpusMismatch as exc:
        print(f"monolab: reference expectation failed: {exc}", file=sys.stderr)
        return VIOLATION
    _emit(args, report)
    return OK if report["agreement"] else VIOLATION


def cmd_fuzz(args) -> int:
    if args.count < 0:
        raise InputError("--count: must be nonnegative")
    vectors = harness.equivalence_fuzz(args.seed, args.count)
    report = harness.assert_equivalences(vectors)
    report["seed"] = args.seed
    report["count"] = args.count
    _emit(args, report)
    return OK if report["passed"] else VIOLATION


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for violations here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(BAD_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="monolab", description="Exact local monotonicity and regularity analysis.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--out", help="write the report here instead of stdout")

    op = sub.add_parser("analyze-operator", help="four-way predicate check for a 1-D polyhedral operator")
    op.add_argument("--input")
    op.add_argument("--point", help="graph point as x,y")
    op.add_argument("--kappa", default="1")
    op.add_argument("--corollary", action="store_true", help="two-sided check for kappa <= 0")
    op.add_argument("--window-radius", default="1")
    op.add_argument("--max-refine", type=int, default=12)
    common(op)
    op.set_defaults(func=cmd_analyze_operator)

    fn = sub.add_parser("analyze-function", help="subdifferential and variational convexity of a 1-D function")
    fn.add_argument("--input")
    fn.add_argument("--point")
    fn.add_argument("--subgrad", default="0")
    fn.add_argument("--kappa", default="0")
    common(fn)
    fn.set_defaults(func=cmd_analyze_function)

    co = sub.add_parser("corpus", help="evaluate the built-in corpus against its expectations")
    common(co)
    co.set_defaults(func=cmd_corpus)

    fz = sub.add_parser("fuzz", help="seeded equivalence fuzzing")
    fz.add_argument("--seed", type=int, default=0)
    fz.add_argument("--count", type=int, default=200)
    common(fz)
    fz.set_defaults(func=cmd_fuzz)
    return ap


_VALUE_FLAGS = ("--kappa", "--point", "--subgrad", "--window-radius")


def _glue_negative_values(argv):
    """Let rationals such as -1/2 follow a flag without '='."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        return args.func(args)
    except (InputError, NotC1Error) as exc:
        print(f"monolab: {exc}", file=sys.stderr)
        return BAD_INPUT
    except GeometryError as exc:
        print(f"monolab: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
