import itertools

import pytest

from latfree.errors import PreconditionError, SignatureError
from latfree.structures import coordinatewise, matrices
from latfree.terms import App, gen, parse_term
from latfree.theories import ONE, ZERO, absval, boolean, chain, dot, m3, n5, plus, scale, vee, wedge
from latfree.vla import (
    PROVED,
    SEPARATED,
    UNKNOWN,
    Budget,
    bi_ideal_support,
    compose,
    dual_numbers,
    lattice_linear,
    lemma_identities,
    make_free,
    preset_handle,
    prove_equal,
    quotient_structure,
    valid_pair,
)

a, b = gen("a"), gen("b")


def test_valid_pairs():
    assert valid_pair("Set", "VS") and valid_pair("Lat", "VL")
    assert not valid_pair("Lat", "VS")
    assert valid_pair("VS", "VLA1P") and not valid_pair("VLA", "VL")
    assert not valid_pair("VLA1P", "VLA1P")
    with pytest.raises(PreconditionError):
        make_free("VL", "VS", structure=coordinatewise(2))
    with pytest.raises(PreconditionError):
        make_free("Set", "VL")
    with pytest.raises(PreconditionError):
        make_free("Lat", "VL")
    with pytest.raises(PreconditionError):
        make_free("Monoid", "VL")


def test_recipe_relation_counts():
    # M3: 25 meets + 25 joins
    assert len(make_free("Lat", "VL", lattice=m3()).relations) == 50
    h = make_free("Lat", "VLA1P", lattice=chain(2))
    assert len(h.relations) == 4 + 4 + 1
    assert make_free("Set", "VLA1", generators=["a"]).relations == []


def test_handle_checks_terms():
    h = make_free("Set", "VL", generators=["a", "b"])
    with pytest.raises(SignatureError):
        h.check(parse_term("(vee a c)", h.sig, ["a", "b", "c"]))
    with pytest.raises(SignatureError):
        h.check(dot(a, b))
    assert "Set -> VL" in h.describe()


def test_set_base_exact_for_lattice_linear_terms():
    h = make_free("Set", "VL", generators=["a", "b"])
    r = prove_equal(h, vee(a, b), plus(plus(a, b), App("neg", (wedge(a, b),))))
    assert r.status == PROVED and r.method == "free vector lattice decision"
    r = prove_equal(h, vee(a, b), a)
    assert r.status == SEPARATED
    assert lattice_linear(vee(a, scale(2, b)))
    assert not lattice_linear(dot(a, b))


def test_unit_laws_and_noncommutativity():
    h = make_free("Set", "VLA1", generators=["a", "b"])
    assert prove_equal(h, dot(ONE, a), a).status == PROVED
    assert prove_equal(h, dot(a, ZERO), ZERO).status == PROVED
    r = prove_equal(h, dot(a, b), dot(b, a))
    assert r.status == SEPARATED and r.witness.matrix is not None


def test_positive_unit_target():
    h = make_free("Set", "VLA1P", generators=["a"])
    assert prove_equal(h, absval(ONE), ONE).status == PROVED
    h1 = make_free("Set", "VLA1", generators=["a"])
    r = prove_equal(h1, absval(ONE), ONE)
    assert r.status == SEPARATED
    assert "dual" in r.witness.structure


def test_lattice_collapse_and_embedding():
    h = make_free("Lat", "VL", lattice=n5())
    names = h.model.names()
    verdicts = {}
    for x, y in itertools.combinations(names, 2):
        verdicts[(x, y)] = prove_equal(h, h.j(x), h.j(y), Budget(rounds=3)).status
    assert PROVED in verdicts.values()
    assert UNKNOWN not in verdicts.values()
    hb = make_free("Lat", "VLA1P", lattice=boolean(3))
    for x, y in list(itertools.combinations(hb.model.names(), 2))[:6]:
        assert prove_equal(hb, hb.j(x), hb.j(y)).status == SEPARATED


def test_vector_base():
    h = make_free("VS", "VL", structure=coordinatewise(2))
    e0, e1 = h.j("e1"), h.j("e2")
    # j is linear: j(e1) + j(e2) = j(e1 + e2), where e1 + e2 gets an automatic name
    both = h.j((1, 1))
    assert prove_equal(h, plus(e0, e1), both).status == PROVED
    assert prove_equal(h, scale(2, e0), h.j((2, 0))).status == PROVED
    assert prove_equal(h, vee(e0, e1), e0).status == SEPARATED


def test_internal_quotient_dual_numbers():
    D = dual_numbers()
    h = make_free("VLA1", "VLA1P", structure=D)
    assert h.internal and len(h.relations) == 1
    u, t = h.j("u"), h.j("t")
    assert prove_equal(h, t, ZERO).status == PROVED
    assert prove_equal(h, u, ONE).status == PROVED
    S = bi_ideal_support(D, (0, 2))  # |1| - 1 = 2t
    Q, q = quotient_structure(D, S)
    assert Q.dim == 1


def test_internal_quotient_trivial_for_positive_unit():
    h = make_free("VLA1", "VLA1P", structure=matrices(2))
    r = prove_equal(h, h.j("E11"), h.j("E22"))
    assert r.status == SEPARATED


def test_composition():
    first = make_free("Set", "VL", generators=["a", "b"])
    h = compose(first, "VLA1")
    assert "composite" in h.note
    assert prove_equal(h, vee(a, b), plus(plus(a, b), App("neg", (wedge(a, b),)))).status == PROVED
    assert prove_equal(h, vee(a, b), a).status == SEPARATED
    with pytest.raises(PreconditionError):
        compose(make_free("Set", "VLA1", generators=["a"]), "VLA1P")


def test_lemmas_are_sound():
    from latfree.fvl import fvl_eq
    from latfree.structures import FVLStructure
    from latfree.termalg import Evaluation, evaluate

    W = FVLStructure(3)
    for ident in lemma_identities("VL"):
        assign = {v: W.sample(__import__("random").Random(i)) for i, v in enumerate(ident.variables)}
        ev = Evaluation(W, assign)
        assert fvl_eq(evaluate(ident.lhs, ev), evaluate(ident.rhs, ev)), str(ident)


def test_unknown_when_budget_is_tiny():
    h = make_free("Lat", "VL", lattice=m3())
    r = prove_equal(h, h.j("a"), h.j("bot"), Budget(rounds=0, trials=1))
    assert r.status in (UNKNOWN, PROVED)
    assert r.status == UNKNOWN or r.stats is not None


def test_presets():
    assert preset_handle("lat", "vl", "M3").model.kind == "Lat"
    with pytest.raises(PreconditionError):
        preset_handle("lat", "vl", "nope")
    assert preset_handle("vla1", "vla1p", "dual").internal
