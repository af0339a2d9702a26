from fractions import Fraction as Fr

import pytest

from monolab.derivative import (
    BOULIGAND,
    STRICT,
    graphical_derivative,
    lower_definite_around,
    lower_definite_on,
    slice,
    strict_graphical_derivative,
)
from monolab.geometry import Polyhedron, Window
from monolab.harness import builtin_corpus, gapped_diagonal, diagonal_with_steep_ray, zero_map, fuzz_cases, identity
from monolab.monotonicity import local_monotone
from monolab.operator import PolyOperator, graph_reps

from oracles import direction_grid

OPERATORS = [c.payload for c in builtin_corpus() if not c.is_function]


def points_of(U):
    return sorted({v for P in U.pieces for v in P.vrep()[0]})


def test_graphical_derivative_examples():
    K = graphical_derivative(diagonal_with_steep_ray(), (0, 0)).cone
    assert K.contains((-2, -2)) and K.contains((1, 2)) and not K.contains((-1, -2))
    K = graphical_derivative(identity(), (3, 3)).cone
    assert K.contains((1, 1)) and K.contains((-1, -1)) and not K.contains((1, 0))
    K = graphical_derivative(zero_map(), (0, 0)).cone
    assert K.contains((1, 0)) and K.contains((-1, 0)) and not K.contains((0, 1))


def test_strict_derivative_examples():
    K = strict_graphical_derivative(gapped_diagonal(), (0, 0)).cone
    assert K.contains((1, 1)) and K.contains((-1, -1)) and not K.contains((0, 1))
    sloped = PolyOperator.from_pieces(1, [Polyhedron.segment((0, 0), (2, -3))])
    K = strict_graphical_derivative(sloped, (1, Fr(-3, 2))).cone
    assert K.contains((2, -3)) and K.contains((-2, 3)) and not K.contains((1, 1))
    K = strict_graphical_derivative(gapped_diagonal(), (0, 1)).cone
    assert K.contains((1, 1)) and K.contains((-1, -1))


def test_slices():
    D = graphical_derivative(diagonal_with_steep_ray(), (0, 0))
    fiber = slice(D, 1)
    assert sorted(v for P in fiber.pieces for (v,) in P.vrep()[0]) == [1, 2]
    assert points_of(slice(graphical_derivative(identity(), (0, 0)), 0)) == [(0,)]
    assert slice(graphical_derivative(gapped_diagonal(), (0, 0)), 1).is_empty()


@pytest.mark.parametrize("F", OPERATORS, ids=lambda F: F.name)
def test_bouligand_inside_strict(F):
    for p in graph_reps(F, Window.square((0, 0), 1)):
        T = graphical_derivative(F, p).cone
        S = strict_graphical_derivative(F, p).cone
        for gens in T.generators():
            assert all(S.contains(g) for g in gens)


@pytest.mark.parametrize("F", OPERATORS, ids=lambda F: F.name)
def test_translation_invariance(F):
    for p in graph_reps(F, Window.square((0, 0), 1))[:6]:
        G = PolyOperator(1, F.graph.map(lambda P: P.translate(tuple(-c for c in p))), F.name)
        for kind in (graphical_derivative, strict_graphical_derivative):
            a, b = kind(F, p).cone, kind(G, (0, 0)).cone
            assert all(a.contains(d) == b.contains(d) for d in direction_grid(2))


def test_lower_definite_around_examples():
    assert lower_definite_on(gapped_diagonal(), Window.square((0, 0), Fr(1, 2)), 1, STRICT).holds
    assert lower_definite_around(diagonal_with_steep_ray(), (0, 0), 1, BOULIGAND).holds
    assert not lower_definite_around(diagonal_with_steep_ray(), (0, 0), 1, STRICT).holds
    assert lower_definite_around(zero_map(), (0, 0), 0).holds
    assert not lower_definite_around(zero_map(), (0, 0), Fr(1, 4)).holds


def _half_window_cases():
    out = [(F, (Fr(0), Fr(0))) for F in OPERATORS]
    for c in fuzz_cases(21, 25):
        out += [(c.operator, p) for p in c.anchors[:2]]
    return out


@pytest.mark.parametrize("F,p", _half_window_cases())
def test_strong_monotonicity_gives_strict_lower_definiteness_on_half_window(F, p):
    from monolab.operator import stabilized_window
    W, _, _ = stabilized_window(F, p)
    for W_ in (W, Window.square(p, 1)):
        for kappa in (Fr(-1), Fr(0), Fr(1, 2), Fr(1)):
            if local_monotone(F, W_, kappa).holds:
                assert lower_definite_on(F, W_.scaled(Fr(1, 2)), kappa, STRICT).holds
