import json
from fractions import Fraction as Fr

import pytest

from monolab.harness import (
    DERIVED,
    REFERENCE,
    TRIVIAL,
    CorpusMismatch,
    Expectation,
    affine_slope_2,
    assert_equivalences,
    builtin_corpus,
    shifted_maximality_check,
    gapped_diagonal,
    diagonal_with_steep_ray,
    zero_map,
    fuzz_cases,
    fuzz_cones,
    identity,
    report_json,
    run_corpus,
    shift_law_holds,
    sup_kappa,
    equivalence_fuzz,
    equivalence_predicates,
)
from monolab.monotonicity import cones_around

O = (Fr(0), Fr(0))


def test_corpus_agrees_with_expectations():
    report = run_corpus()
    assert report["agreement"]
    assert {c.name for c in builtin_corpus()} >= {"gapped_diagonal", "diagonal_with_steep_ray", "zero_map", "shelf", "square"}


def test_corpus_provenance_tags():
    tags = {e.provenance for c in builtin_corpus() for e in c.expected}
    assert tags <= {REFERENCE, TRIVIAL, DERIVED} and REFERENCE in tags


def test_reference_mismatch_raises():
    case = next(c for c in builtin_corpus() if c.name == "gapped_diagonal")
    wrong = Expectation("locally_maximal_monotone", (), True, REFERENCE, "deliberately wrong")
    broken = type(case)(case.name, case.payload, case.anchor, [wrong])
    with pytest.raises(CorpusMismatch):
        run_corpus([broken])


def test_predicate_vectors_on_examples():
    assert equivalence_predicates(identity(), O, 1).values == (True,) * 4
    assert equivalence_predicates(gapped_diagonal(), O, 1).values == (False,) * 4
    v = equivalence_predicates(affine_slope_2(), O, 2)
    assert v.values == (True,) * 4
    assert equivalence_predicates(affine_slope_2(), O, 3).values == (False,) * 4


def test_predicates_reject_nonpositive_kappa():
    with pytest.raises(ValueError):
        equivalence_predicates(identity(), O, 0)


def test_shifted_maximality_on_examples():
    r = shifted_maximality_check(zero_map(), O, 0)
    assert r["agreement"] and r["shifted_maximal"].holds
    r = shifted_maximality_check(diagonal_with_steep_ray(), O, Fr(-1, 2))
    assert r["agreement"]


def test_assert_equivalences_reports_injected_mismatch():
    good = equivalence_predicates(identity(), O, 1)
    bad = equivalence_predicates(identity(), O, 1)
    bad.c = equivalence_predicates(gapped_diagonal(), O, 1).c
    report = assert_equivalences([good, bad])
    assert not report["passed"] and len(report["violations"]) == 1
    assert report["violations"][0]["discrepancy"] == "true: abd; false: c"
    assert assert_equivalences([]) == {"passed": True, "checked": 0, "violations": []}


def test_fuzz_is_deterministic():
    a = [c.operator for c in fuzz_cases(3, 20)]
    b = [c.operator for c in fuzz_cases(3, 20)]
    assert a == b
    assert a != [c.operator for c in fuzz_cases(4, 20)]
    assert fuzz_cones(5, 10) == fuzz_cones(5, 10)


def test_fuzz_anchors_lie_on_graph():
    for c in fuzz_cases(6, 40, {"mutate_gap": True}):
        assert all(c.operator.contains(p) for p in c.anchors)
        assert c.gap_anchor is None or c.operator.contains(c.gap_anchor)


def test_small_equivalence_fuzz_agrees():
    vectors = equivalence_fuzz(8, 12)
    assert len(vectors) == 36
    assert assert_equivalences(vectors)["passed"]


def test_fuzz_report_serializes_stably():
    vectors = equivalence_fuzz(9, 3, kappas=(Fr(1, 2),))
    a = json.dumps(report_json(vectors), sort_keys=True)
    b = json.dumps(report_json(equivalence_fuzz(9, 3, kappas=(Fr(1, 2),))), sort_keys=True)
    assert a == b


def test_shift_law_on_small_cone_sample():
    for K in fuzz_cones(10, 30):
        for gamma in (Fr(-1), Fr(1, 2), Fr(2)):
            for kappa in (Fr(-1), Fr(0), Fr(1)):
                assert shift_law_holds(K, kappa, gamma)


def test_sup_kappa_brackets_identity_slope():
    lo, hi = sup_kappa(cones_around(identity(), O, ))
    assert lo <= 1 < hi and hi - lo <= Fr(1, 2**20)
