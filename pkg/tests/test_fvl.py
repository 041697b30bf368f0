import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latfree.errors import SignatureError
from latfree.fvl import (
    LinForm,
    MinMaxForm,
    PointSeminorm,
    differ_on_sample,
    from_term,
    fvl_counterexample,
    fvl_difference,
    fvl_eq,
    fvl_leq,
    integer_values,
    kernel_quotient,
    parse_points,
    random_points,
    rho_lower_bound,
    to_term,
)
from latfree.terms import parse_term
from latfree.theories import VL_SIG

from test_acceptance import random_form

G2 = ["x1", "x2"]


def F(src, gens=G2):
    return from_term(parse_term(src, VL_SIG, gens), gens)


def test_evaluation():
    assert F("(vee x1 x2)")((3, 5)) == 5
    assert F("(wedge x1 (neg x2))")((3, 5)) == -5
    assert F("(scale 1/2 (plus x1 x2))")((1, 2)) == Fraction(3, 2)
    with pytest.raises(ValueError):
        F("x1")((1,))


def test_known_identities():
    assert fvl_eq(F("(vee x1 x2)"), F("(plus (plus x1 x2) (neg (wedge x1 x2)))"))
    x, y = MinMaxForm.variable(0, 2), MinMaxForm.variable(1, 2)
    assert fvl_leq((x + y).abs(), x.abs() + y.abs())
    assert not fvl_leq(x.abs() + y.abs(), (x + y).abs())
    assert fvl_eq(x.pos() - (-x).pos(), x)
    assert fvl_eq(x.pos().meet((-x).pos()), MinMaxForm.zero(2))


def test_witnesses():
    assert fvl_counterexample(F("(vee x1 x2)"), F("x1")) == (0, 1)
    a = from_term(parse_term("(vee x1 (neg x1))", VL_SIG, ["x1"]), ["x1"])
    pt = fvl_counterexample(a, MinMaxForm.variable(0, 1))
    assert pt is not None and pt[0] < 0
    assert fvl_difference(F("x1"), F("x1")) is None


def test_generator_mismatch():
    with pytest.raises(SignatureError):
        MinMaxForm.variable(0, 2).join(MinMaxForm.variable(0, 3))
    with pytest.raises(SignatureError):
        from_term(parse_term("(vee x1 q)", VL_SIG, ["x1", "q"]), ["x1"])


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_term_round_trip(seed, n):
    rng = random.Random(seed)
    a = random_form(rng, n, 5)
    gens = [f"x{i + 1}" for i in range(n)]
    assert fvl_eq(from_term(to_term(a, gens), gens), a)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_lattice_laws_on_random_forms(seed, n):
    rng = random.Random(seed)
    a, b, c = (random_form(rng, n, 3) for _ in range(3))
    assert fvl_eq(a.meet(b.join(c)), a.meet(b).join(a.meet(c)))
    assert fvl_eq(a.join(b) + c, (a + c).join(b + c))
    assert fvl_leq(a.meet(b), a.join(b))
    pt = fvl_difference(a, b)
    if pt is not None:
        assert a(pt) != b(pt)


def test_integer_values_match_exact():
    rng = random.Random(3)
    forms = [random_form(rng, 3, 6) for _ in range(5)]
    pts = random_points(np.random.default_rng(0), 200, 3)
    vals = integer_values(forms, pts)
    for f, v in zip(forms, vals):
        exact = [f(tuple(int(c) for c in p)) for p in pts]
        scale = Fraction(int(v[0]), 1) / exact[0] if exact[0] else None
        for e, w in zip(exact, v):
            if scale is not None:
                assert Fraction(int(w)) == e * scale
    a, b = F("(vee x1 x2)"), F("x1")
    hit = differ_on_sample(a, b, random_points(np.random.default_rng(1), 100, 2))
    assert hit is not None


def test_rho_and_points():
    x1 = MinMaxForm.variable(0, 2)
    est = rho_lower_bound(x1, [(0, 1), (1, 0), (Fraction(1, 2), Fraction(1, 2))])
    assert est.value == 1 and est.best == (1, 0)
    with pytest.raises(ValueError):
        rho_lower_bound(x1, [(2, 0)])
    assert parse_points("1 0\n1/2 -1\n# c\n") == [(1, 0), (Fraction(1, 2), -1)]


def test_point_seminorm_kernel():
    x1, x2 = MinMaxForm.variable(0, 2), MinMaxForm.variable(1, 2)
    sigma = PointSeminorm([(1, 0)])
    assert sigma(x2) == 0 and sigma(x1.scale(-3)) == 3
    kq = kernel_quotient([x1, x2, x2.scale(2), x2.abs()], sigma)
    assert [1, 2, 3] in kq.classes
    with pytest.raises(ValueError):
        PointSeminorm([])


def test_linform_str():
    assert str(LinForm((1, 0, -2))) == "1*x1 + -2*x3"
    assert str(LinForm((0, 0))) == "0"


def test_equality_is_functional():
    x, y = MinMaxForm.variable(0, 2), MinMaxForm.variable(1, 2)
    a = x.join(y)
    b = (x + y) - x.meet(y)
    assert a == b and hash(a) == hash(b)
    assert len({a, b, x}) == 2
    assert a != x
    assert MinMaxForm.zero(2) != MinMaxForm.zero(3)
