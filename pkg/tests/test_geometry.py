from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from monolab.geometry import (
    INF,
    ConeUnion,
    GeometryError,
    Polyhedron,
    PolyUnion,
    Window,
    contains,
    dist_sq,
    paratingent_cone,
    shift_set,
    swap_blocks,
    tangent_cone,
    vrep,
)
from monolab.harness import gapped_diagonal, diagonal_with_steep_ray

from oracles import direction_grid, paratingent_oracle, tangent_oracle

half_plane = Polyhedron(2, (((1, 0), 0),))
rats = st.fractions(min_value=-4, max_value=4, max_denominator=8)


def test_contains_boundary_and_violation():
    assert contains(half_plane, (0, 0))
    assert not contains(half_plane, (1, 0))
    seg = Polyhedron.segment((-1, -1), (0, 0))
    assert contains(seg, (Fr(-1, 2), Fr(-1, 2)))
    assert not contains(seg, (Fr(1, 2), Fr(1, 2)))


def test_contains_dimension_mismatch():
    with pytest.raises(GeometryError):
        half_plane.contains((0, 0, 0))


def test_vrep_examples():
    verts, rays = vrep(Polyhedron.ray((0, 0), (-1, -1)))
    assert verts == [(0, 0)] and rays == [(-1, -1)]
    verts, rays = vrep(Polyhedron.box((Fr(1, 2), Fr(1, 2)), (Fr(1, 2), Fr(1, 2))))
    assert sorted(verts) == [(0, 0), (0, 1), (1, 0), (1, 1)] and rays == []
    wedge = Polyhedron(2, (((2, -1), 0), ((-3, 1), 0)))  # z2 >= 2 z1, z2 <= 3 z1
    verts, rays = vrep(wedge)
    assert verts == [(0, 0)]
    assert sorted(rays) == [(1, 2), (1, 3)]


def test_vrep_of_empty_raises():
    empty = Polyhedron(2, (((1, 0), -1), ((-1, 0), -1)))
    assert empty.is_empty()
    with pytest.raises(GeometryError):
        empty.vrep()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(rats, rats), min_size=1, max_size=4), st.lists(st.tuples(rats, rats), max_size=4))
def test_vrep_round_trip_on_grid(points, probes):
    P = Polyhedron.hull(points)
    verts, rays = P.vrep()
    Q = Polyhedron.hull(verts, rays)
    for z in list(points) + list(probes) + verts:
        assert P.contains(z) == Q.contains(z)


def test_tangent_cone_examples():
    T = tangent_cone(gapped_diagonal().graph, (0, 0))
    assert T.contains((-1, -1)) and not T.contains((1, 1)) and not T.contains((0, 1))
    line = PolyUnion(2, (Polyhedron.line((0, 0), (1, 1)),))
    T = tangent_cone(line, (0, 0))
    assert T.contains((3, 3)) and T.contains((-2, -2)) and not T.contains((1, 0))
    T = tangent_cone(diagonal_with_steep_ray().graph, (0, 0))
    assert T.contains((-1, -1)) and T.contains((1, 2)) and not T.contains((-1, -2))


def test_tangent_cone_requires_membership():
    with pytest.raises(GeometryError):
        tangent_cone(gapped_diagonal().graph, (1, 0))


def test_paratingent_examples():
    K = paratingent_cone(gapped_diagonal().graph, (0, 0))
    assert K.contains((1, 1)) and K.contains((-1, -1)) and not K.contains((1, 0))
    pt = PolyUnion(2, (Polyhedron.point((1, 2)),))
    K = paratingent_cone(pt, (1, 2))
    assert K.contains((0, 0)) and not any(K.contains(d) for d in direction_grid(2, 1))
    half = PolyUnion(2, (Polyhedron.ray((0, 0), (1, 1)),))
    K = paratingent_cone(half, (0, 0))
    assert K.contains((-1, -1)) and K.contains((1, 1))


def test_dist_sq_examples():
    line = PolyUnion(2, (Polyhedron(2, (), (((1, 0), 1),)),))
    assert dist_sq((0, 0), line) == 1
    assert dist_sq((0, 0), PolyUnion(2, ())) == INF
    diag = PolyUnion(2, (Polyhedron.line((0, 0), (1, 1)),))
    assert dist_sq((1, 0), diag) == Fr(1, 2)


@settings(max_examples=60, deadline=None)
@given(rats, rats)
def test_dist_sq_zero_iff_member(x, y):
    C = diagonal_with_steep_ray().graph
    assert (dist_sq((x, y), C) == 0) == C.contains((x, y))


def _corpus_sets():
    from monolab.harness import builtin_corpus
    from monolab.subdiff import subdiff_graph
    out = []
    for case in builtin_corpus():
        U = subdiff_graph(case.payload).operator.graph if case.is_function else case.payload.graph
        out.append((case.name, U, case.anchor))
        for P in U.pieces:
            out.append((case.name + "_vertex", U, P.vrep()[0][0]))
    return out


@pytest.mark.parametrize("name,U,p", _corpus_sets(), ids=lambda v: v if isinstance(v, str) else None)
def test_cones_match_sampling_oracles(name, U, p):
    T = tangent_cone(U, p)
    K = paratingent_cone(U, p)
    for d in direction_grid(2):
        assert T.contains(d) == tangent_oracle(U, p, d), ("tangent", d)
        assert K.contains(d) == paratingent_oracle(U, p, d), ("paratingent", d)


@pytest.mark.parametrize("name,U,p", _corpus_sets()[:12])
def test_tangent_cone_is_a_cone_inside_paratingent(name, U, p):
    T = tangent_cone(U, p)
    K = paratingent_cone(U, p)
    for gens in T.generators():
        for g in gens:
            for s in (Fr(1, 2), 2, 7):
                assert T.contains(tuple(s * c for c in g))
            assert K.contains(g)


def test_cone_union_rejects_affine_piece():
    with pytest.raises(GeometryError):
        ConeUnion(2, (Polyhedron.point((1, 0)),))


def test_window_semantics():
    W = Window.square((0, 0), Fr(1, 2))
    assert W.contains_open((Fr(1, 4), 0)) and not W.contains_open((Fr(1, 2), 0))
    assert W.shrunk().box().contains((Fr(1, 2) * (1 - Fr(1, 2**20)), 0))
    with pytest.raises(GeometryError):
        Window.square((0, 0), 0)


def test_shift_and_swap():
    C = PolyUnion(2, (Polyhedron.line((0, 0), (1, 1)),))
    S = shift_set(C, 2)
    assert S.contains((1, 3)) and not S.contains((1, 1))
    R = swap_blocks(gapped_diagonal().graph)
    assert R.contains((1, 0)) and not R.contains((0, 1))


def test_json_round_trip():
    P = Polyhedron.ray((0, 1), (1, 1))
    Q = Polyhedron.from_json(P.to_json(), 2)
    assert P.same_set(Q)
