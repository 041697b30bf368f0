from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from latfree.errors import BudgetExceeded
from latfree.fm import is_strict_feasible, primitive, strict_feasible


def dot(r, x):
    return sum(Fraction(a) * b for a, b in zip(r, x))


def test_primitive():
    assert primitive([Fraction(1, 2), Fraction(-3, 4)]) == (2, -3)
    assert primitive([4, 6, 0]) == (2, 3, 0)
    assert primitive([0, 0]) == (0, 0)


def test_simple_systems():
    assert strict_feasible([(1, 0), (-1, 0)]) is None
    assert strict_feasible([(0, 0)]) is None
    pt = strict_feasible([(1, -1), (0, 1)])
    assert pt[0] > pt[1] > 0
    assert strict_feasible([], 3) == (0, 0, 0)
    # x > y > z > x has no solution
    assert not is_strict_feasible([(1, -1, 0), (0, 1, -1), (-1, 0, 1)])


rows = st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=7)


@settings(max_examples=300, deadline=None)
@given(rows)
def test_witness_is_valid(rs):
    pt = strict_feasible(rs, 3)
    if pt is not None:
        assert all(dot(r, pt) > 0 for r in rs)


@settings(max_examples=300, deadline=None)
@given(rows, st.lists(st.integers(-6, 6), min_size=3, max_size=3))
def test_infeasible_means_no_point(rs, probe):
    # an explicit point satisfying every row contradicts a None verdict
    if all(dot(r, probe) > 0 for r in rs):
        assert strict_feasible(rs, 3) is not None


def test_row_cap():
    rs = [(1, i, -j, 1) for i in range(-5, 6) for j in range(-5, 6)] + [(-1, i, j, -2) for i in range(-5, 6) for j in range(-5, 6)]
    with pytest.raises(BudgetExceeded):
        strict_feasible(rs, 4, cap=50)
