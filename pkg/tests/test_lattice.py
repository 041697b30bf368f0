import itertools

import pytest
from hypothesis import given, settings

from latfree.errors import NotDistributive, SignatureError
from latfree.lattice import (
    all_dlat_normal_forms,
    birkhoff_embed,
    collapse_witness,
    distributive_violation,
    dlat_eq,
    dlat_normal_form,
    free_lattice_eq,
    free_lattice_leq,
    is_distributive,
    join_irreducibles,
)
from latfree.terms import App, Gen, parse_term
from latfree.theories import LAT_SIG, boolean, chain, enumerate_lattices, m3, n5

from test_terms import lat_terms


def T(src):
    return parse_term(src, LAT_SIG)


def lat_eval(t, L, assign):
    if isinstance(t, Gen):
        return assign[t.name]
    a, b = (lat_eval(s, L, assign) for s in t.args)
    return L.meet(a, b) if t.op == "wedge" else L.join(a, b)


def test_whitman_basics():
    assert free_lattice_leq(T("(wedge x y)"), T("(vee x z)"))
    assert not free_lattice_leq(T("x"), T("y"))
    assert free_lattice_eq(T("(vee x (wedge x y))"), T("x"))
    # distributive inequality holds one way only
    lhs, rhs = T("(vee (wedge x y) (wedge x z))"), T("(wedge x (vee y z))")
    assert free_lattice_leq(lhs, rhs)
    assert not free_lattice_leq(rhs, lhs)
    # semidistributivity fails in free lattices
    assert not free_lattice_leq(T("(wedge (vee x y) (vee x z))"), T("(vee x (wedge y z))"))


def test_non_lattice_terms_rejected():
    with pytest.raises(SignatureError):
        free_lattice_leq(App("plus", (Gen("x"), Gen("y"))), Gen("x"))


@settings(max_examples=150, deadline=None)
@given(lat_terms(), lat_terms())
def test_whitman_sound_on_n5(s, t):
    if not free_lattice_leq(s, t):
        return
    L = n5()
    for vals in itertools.product(range(L.size), repeat=3):
        assign = dict(zip(("x", "y", "z"), vals))
        assert L.leq(lat_eval(s, L, assign), lat_eval(t, L, assign))


@settings(max_examples=150, deadline=None)
@given(lat_terms(), lat_terms())
def test_free_implies_distributive(s, t):
    if free_lattice_eq(s, t):
        assert dlat_eq(s, t)


@settings(max_examples=150, deadline=None)
@given(lat_terms(), lat_terms())
def test_dlat_complete_for_two_element_chain(s, t):
    # the two-element lattice generates the distributive variety
    L = chain(2)
    same = all(
        lat_eval(s, L, dict(zip("xyz", v))) == lat_eval(t, L, dict(zip("xyz", v)))
        for v in itertools.product(range(2), repeat=3)
    )
    assert dlat_eq(s, t) == same


@given(lat_terms())
def test_normal_form_term_round_trip(t):
    nf = dlat_normal_form(t)
    assert dlat_normal_form(nf.to_term()) == nf


def test_normal_form_text():
    assert str(dlat_normal_form(T("(wedge x (vee y z))"))) == "{{x,y},{x,z}}"
    assert len(all_dlat_normal_forms(["x", "y"])) == 4


def test_distributivity_checks():
    assert distributive_violation(m3()) == (1, 2, 3)
    assert distributive_violation(n5()) is not None
    assert is_distributive(boolean(3)) and is_distributive(chain(4))
    assert not is_distributive(n5())


def test_join_irreducibles():
    assert join_irreducibles(chain(4)) == [1, 2, 3]
    assert len(join_irreducibles(boolean(3))) == 3


def test_birkhoff_embedding_is_injective_homomorphism():
    for L in enumerate_lattices(6, up_to_iso=True):
        if not is_distributive(L):
            with pytest.raises(NotDistributive):
                birkhoff_embed(L)
            continue
        e = birkhoff_embed(L)
        assert len(set(e.vectors)) == L.size
        for a, b in itertools.product(range(L.size), repeat=2):
            assert e(L.meet(a, b)) == tuple(map(min, e(a), e(b)))
            assert e(L.join(a, b)) == tuple(map(max, e(a), e(b)))


def test_birkhoff_names():
    assert birkhoff_embed(boolean(2)).by_name() == {"bot": (0, 0), "a": (1, 0), "b": (0, 1), "top": (1, 1)}


def test_collapse_witness():
    w = collapse_witness(m3())
    assert (w.first, w.second) == ("a", "bot")
    assert w.certified
    assert len(w.steps) == 6
    assert w.lines()[0].startswith("j(a) = j(bot)")
    assert collapse_witness(boolean(3)) is None
    assert collapse_witness(n5()).certified
