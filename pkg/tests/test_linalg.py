from fractions import Fraction as Fr

import numpy as np
from hypothesis import given, settings, strategies as st

from monolab import linalg as la

ints = st.integers(min_value=-5, max_value=5)


def test_primitive_vector():
    assert la.primitive((Fr(2, 3), Fr(4, 3))) == (1, 2)
    assert la.primitive((0, -6)) == (0, -1)


def test_solve_unique_and_singular():
    assert la.solve_unique([[2, 0], [0, 4]], [2, 2], 2) == (1, Fr(1, 2))
    assert la.solve_unique([[1, 1], [2, 2]], [1, 2], 2) is None


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(ints, min_size=3, max_size=3), min_size=1, max_size=4))
def test_rank_and_nullspace_match_numpy(rows):
    assert la.rank(rows, 3) == np.linalg.matrix_rank(np.array(rows, dtype=float))
    for v in la.nullspace(rows, 3):
        assert all(la.dot(r, v) == 0 for r in rows)
    assert len(la.nullspace(rows, 3)) == 3 - la.rank(rows, 3)
