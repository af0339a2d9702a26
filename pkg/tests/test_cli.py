import csv
import io
import json
from fractions import Fraction as Fr
from pathlib import Path

import pytest

from monolab.cli import main

INPUTS = Path(__file__).resolve().parent.parent / "inputs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_operator_example_reports_all_false(capsys):
    code, out, _ = run(capsys, "analyze-operator", "--input", INPUTS / "gapped_diagonal.json", "--point", "0,0",
                       "--kappa", "1")
    rep = json.loads(out)
    assert code == 0 and rep["agreement"]
    assert [rep["predicates"][k]["holds"] for k in "abcd"] == [False] * 4


def test_operator_identity_reports_all_true(capsys):
    code, out, _ = run(capsys, "analyze-operator", "--input", INPUTS / "identity.json", "--point", "0,0")
    assert code == 0
    assert all(v["holds"] for v in json.loads(out)["predicates"].values())


def test_nonpositive_kappa_points_to_corollary_mode(capsys):
    code, _, err = run(capsys, "analyze-operator", "--input", INPUTS / "gapped_diagonal.json", "--point", "0,0",
                       "--kappa", "0")
    assert code == 1 and "--corollary" in err


def test_corollary_mode_accepts_negative_kappa(capsys):
    code, out, _ = run(capsys, "analyze-operator", "--corollary", "--input", INPUTS / "diagonal_with_steep_ray.json",
                       "--point", "0,0", "--kappa", "-1/2")
    rep = json.loads(out)
    assert code == 0 and rep["agreement"] and Fr(rep["kappa"]) == Fr(-1, 2)


def test_point_off_graph_is_input_error(capsys):
    code, _, err = run(capsys, "analyze-operator", "--input", INPUTS / "identity.json", "--point", "0,1")
    assert code == 1 and "--point" in err


def test_malformed_operator_names_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 1, "pieces": [{"kind": "segment", "a": ["0", "0"]}]}))
    code, _, err = run(capsys, "analyze-operator", "--input", bad, "--point", "0,0")
    assert code == 1 and "pieces[0].b" in err


def test_missing_file_and_usage_errors(capsys):
    code, _, err = run(capsys, "analyze-operator", "--input", "/nonexistent.json", "--point", "0,0")
    assert code == 1 and "cannot read" in err
    with pytest.raises(SystemExit) as exc:
        main(["analyze-operator", "--bogus"])
    assert exc.value.code == 1


@pytest.mark.parametrize("name,point,subgrad,kappa", [
    ("shelf.json", "0", "0", "0"),
    ("square.json", "0", "0", "1"),
    ("neg_square.json", "0", "0", "-2"),
])
def test_function_examples_hold(capsys, name, point, subgrad, kappa):
    code, out, _ = run(capsys, "analyze-function", "--input", INPUTS / name, "--point", point,
                       "--subgrad", subgrad, "--kappa", kappa)
    rep = json.loads(out)
    assert code == 0 and rep["variationally_convex"]["holds"]


def test_function_c1_cross_check(capsys):
    code, out, _ = run(capsys, "analyze-function", "--input", INPUTS / "huber_glue.json", "--point", "1",
                       "--subgrad", "1", "--kappa", "1/2")
    rep = json.loads(out)
    assert code == 0 and rep["c1_cross_check"]["agreement"]
    assert not rep["c1_cross_check"]["locally_kappa_convex"]["holds"]


def test_non_lsc_function_rejected(capsys):
    code, _, err = run(capsys, "analyze-function", "--input", INPUTS / "not_lsc.json", "--point", "0")
    assert code == 1 and "breakpoint 0" in err


def test_bad_subgradient_rejected(capsys):
    code, _, err = run(capsys, "analyze-function", "--input", INPUTS / "square.json", "--point", "0",
                       "--subgrad", "1")
    assert code == 1 and "--subgrad" in err


def test_csv_dump_is_exact(capsys):
    code, out, _ = run(capsys, "analyze-operator", "--input", INPUTS / "gapped_diagonal.json", "--point", "0,0",
                       "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["object", "piece", "kind", "x", "y"]
    body = rows[1:]
    assert {r[0] for r in body} == {"graph", "tangent_cone"}
    assert all(Fr(r[3]) is not None and Fr(r[4]) is not None for r in body)
    assert ["graph", "1", "vertex", "0", "1"] in body


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "corpus.json"
    code, out, _ = run(capsys, "corpus", "--out", target)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["agreement"]


def test_fuzz_report_is_byte_identical(capsys):
    first = run(capsys, "fuzz", "--seed", "7", "--count", "6")
    second = run(capsys, "fuzz", "--seed", "7", "--count", "6")
    assert first[0] == 0 and first == second
    rep = json.loads(first[1])
    assert rep["passed"] and rep["checked"] == 18 and rep["seed"] == 7
