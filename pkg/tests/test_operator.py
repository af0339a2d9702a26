from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from monolab.geometry import Polyhedron, Window, dist_sq
from monolab.harness import builtin_corpus, gapped_diagonal, diagonal_with_steep_ray, zero_map, identity
from monolab.operator import (
    PolyOperator,
    WindowSchedule,
    feature_sq,
    inner_semicontinuous_at,
    invert,
    localize,
    locally_closed_at,
    shift,
    shift_point,
    stabilized_radius,
)
from monolab.verdict import InputError

OPERATORS = [c.payload for c in builtin_corpus() if not c.is_function]


def same_graph(F, G):
    return F.graph.same_pieces(G.graph)


def test_shift_examples():
    assert shift(identity(), 1).graph.contains((1, 2))
    assert not shift(identity(), 1).graph.contains((1, 1))
    s = Fr(3, 7)
    assert shift(zero_map(), s).graph.contains((7, 3))


@pytest.mark.parametrize("F", OPERATORS, ids=lambda F: F.name)
@pytest.mark.parametrize("gamma", [Fr(-1), Fr(1, 2), Fr(2)])
def test_shift_is_invertible(F, gamma):
    assert same_graph(shift(shift(F, gamma), -gamma), F)


@pytest.mark.parametrize("F", OPERATORS, ids=lambda F: F.name)
def test_invert_twice_is_identity(F):
    assert same_graph(invert(invert(F)), F)


def test_invert_examples():
    G = invert(PolyOperator.from_pieces(1, [Polyhedron.line((0, 0), (1, 2))]))
    assert G.contains((2, 1)) and not G.contains((1, 2))
    pre = gapped_diagonal().preimage((0,))
    assert pre.contains((0,)) and not pre.contains((-1,))
    assert [P.vrep()[0] for P in pre.pieces] == [[(0,)]]


def test_localize_examples():
    W = Window.square((0, 0), Fr(1, 2))
    G = localize(gapped_diagonal(), W)
    assert [sorted(P.vrep()[0]) for P in G.graph.pieces] == [[(Fr(-1, 2), Fr(-1, 2)), (0, 0)]]
    assert localize(gapped_diagonal(), Window.square((5, 5), Fr(1, 4))).graph.is_empty()
    big = Window.square((0, 0), 10)
    seg = PolyOperator.from_pieces(1, [Polyhedron.segment((0, 0), (1, 1))])
    assert same_graph(localize(seg, big), seg)


@pytest.mark.parametrize("F", OPERATORS, ids=lambda F: F.name)
def test_localize_idempotent(F):
    W = Window.square((0, 0), Fr(1, 3))
    once = localize(F, W)
    assert same_graph(localize(once, W), once)


def test_feature_scale_and_stabilization():
    F = gapped_diagonal()
    assert feature_sq(F, (0, 0)) == 1
    r, stable, _ = stabilized_radius(F, (0, 0))
    assert r == Fr(1, 2) and stable
    assert stabilized_radius(zero_map(), (0, 0))[0] == 1


def test_schedule_radii():
    assert WindowSchedule(Fr(1, 2), 3).radii() == [Fr(1, 2), Fr(1, 4), Fr(1, 8), Fr(1, 16)]


def _isc_oracle(F, xbar, ybar, delta, eta, steps=128):
    """True iff every grid y in the eta-box has dist^2(xbar, F^-1(y)) < delta^2."""
    for k in range(-steps, steps + 1):
        y = ybar + eta * Fr(k, steps)
        if not dist_sq((xbar,), F.preimage((y,))) < delta * delta:
            return False
    return True


@pytest.mark.parametrize("F,p,expected", [
    (gapped_diagonal(), (0, 0), False),
    (identity(), (0, 0), True),
    (identity(), (Fr(3, 2), Fr(3, 2)), True),
    (zero_map(), (0, 0), False),
    (diagonal_with_steep_ray(), (0, 0), True),
    (gapped_diagonal(), (0, 1), False),
])
def test_inner_semicontinuity_against_grid_oracle(F, p, expected):
    v = inner_semicontinuous_at(F, p[1], p[0])
    assert v.holds == expected
    if v.holds:
        for pair in v.certificate["delta_eta"]:
            assert _isc_oracle(F, p[0], p[1], pair["delta"], pair["eta"])
    else:
        delta = v.witness["delta"]
        for k in range(0, 13):
            assert not _isc_oracle(F, p[0], p[1], delta, delta / 2**k)


@pytest.mark.parametrize("F", OPERATORS, ids=lambda F: F.name)
def test_locally_closed(F):
    assert locally_closed_at(F, (0, 0)).holds


def test_from_json_names_bad_field():
    good = {"n": 1, "name": "e31", "pieces": [
        {"kind": "segment", "a": ["-1", "-1"], "b": ["0", "0"]},
        {"kind": "point", "at": ["0", "1"]},
        {"kind": "ray", "from": ["0", "1"], "dir": ["1", "1"]},
    ]}
    F = PolyOperator.from_json(good)
    assert F.contains((Fr(-1, 2), Fr(-1, 2))) and F.contains((0, 1))
    bad = {"n": 1, "pieces": [{"kind": "point", "at": ["0", "x/2"]}]}
    with pytest.raises(InputError, match=r"pieces\[0\]\.at"):
        PolyOperator.from_json(bad)
    with pytest.raises(InputError, match="kind"):
        PolyOperator.from_json({"n": 1, "pieces": [{"kind": "blob"}]})


def test_json_round_trip():
    F = diagonal_with_steep_ray()
    assert same_graph(PolyOperator.from_json(F.to_json()), F)


@settings(max_examples=50, deadline=None)
@given(st.fractions(-2, 2, max_denominator=8), st.sampled_from([Fr(-1), Fr(1, 2), Fr(2)]))
def test_shift_point_stays_on_graph(t, gamma):
    F = diagonal_with_steep_ray()
    p = (t, t)
    assert shift(F, gamma).contains(shift_point(p, gamma))
