from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from latfree.errors import ParseError, SignatureError, UnboundGenerator
from latfree.terms import (
    App,
    Gen,
    GeneratorSet,
    Signature,
    check_term,
    generators_of,
    height,
    parse_identity,
    parse_term,
    substitute,
    to_sexpr,
)
from latfree.theories import LAT_SIG, VLA1_SIG, VL_SIG


def lat_terms(gens=("x", "y", "z")):
    leaf = st.sampled_from([Gen(g) for g in gens])
    return st.recursive(
        leaf,
        lambda kids: st.builds(lambda op, a, b: App(op, (a, b)), st.sampled_from(["wedge", "vee"]), kids, kids),
        max_leaves=12,
    )


def vl_terms():
    leaf = st.sampled_from([Gen("a"), Gen("b"), App("zero")])
    scalars = st.fractions(min_value=-5, max_value=5, max_denominator=7)

    def grow(kids):
        return st.one_of(
            st.builds(lambda op, a, b: App(op, (a, b)), st.sampled_from(["vee", "wedge", "plus"]), kids, kids),
            st.builds(lambda a: App("neg", (a,)), kids),
            st.builds(lambda q, a: App("scale", (a,), q), scalars, kids),
        )

    return st.recursive(leaf, grow, max_leaves=10)


@given(lat_terms())
def test_lattice_round_trip(t):
    assert parse_term(to_sexpr(t), LAT_SIG) == t


@settings(max_examples=200)
@given(vl_terms())
def test_scalar_round_trip(t):
    assert parse_term(to_sexpr(t), VL_SIG) == t


def test_gen_syntax_and_aliases():
    t = parse_term("(wedge (gen a) b)", LAT_SIG)
    assert t == App("wedge", (Gen("a"), Gen("b")))
    s = parse_term("(scale -3/7 a)", VL_SIG)
    assert s.scalar == Fraction(-3, 7)


@pytest.mark.parametrize(
    "src",
    ["(wedge x", "wedge x y)", "(wedge x)", "(frob x y)", "()", "(scale x a)", ""],
)
def test_parse_errors(src):
    with pytest.raises((ParseError, SignatureError)):
        parse_term(src, VL_SIG)


def test_parse_error_has_offset():
    with pytest.raises(ParseError) as e:
        parse_term("(wedge x (vee y", LAT_SIG)
    assert "offset" in str(e.value)


def test_generators_restricted():
    with pytest.raises((UnboundGenerator, ParseError, SignatureError)):
        parse_term("(vee a q)", LAT_SIG, ["a", "b"])


def test_generator_clash_with_symbol():
    with pytest.raises(SignatureError):
        GeneratorSet(("vee",)).check_disjoint(LAT_SIG)


def test_signature_validation_and_text():
    with pytest.raises(SignatureError):
        Signature((("f", 2), ("f", 1)))
    with pytest.raises(SignatureError):
        Signature(())
    assert Signature.from_text(VLA1_SIG.to_text()) == VLA1_SIG
    assert LAT_SIG.is_subsignature_of(VLA1_SIG)
    assert not VLA1_SIG.is_subsignature_of(LAT_SIG)
    assert VLA1_SIG.arity("scale") == 1
    assert "one" in VLA1_SIG.constants


def test_substitute_height_generators():
    t = parse_term("(vee x (wedge y x))", LAT_SIG)
    assert height(t) == 2
    assert generators_of(t) == {"x", "y"}
    s = substitute(t, {"x": parse_term("(wedge a b)", LAT_SIG), "y": Gen("y")})
    assert generators_of(s) == {"a", "b", "y"}
    assert height(s) == 3
    with pytest.raises(UnboundGenerator):
        substitute(t, {"x": Gen("y")})


def test_check_term_arity():
    with pytest.raises(SignatureError):
        check_term(App("vee", (Gen("x"),)), LAT_SIG)


def test_identity_variables_sorted_naturally():
    ident = parse_identity("(vee v10 v2) = (vee v1 v2)", LAT_SIG)
    assert ident.variables == ["v1", "v2", "v10"]
