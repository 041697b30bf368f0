from fractions import Fraction

import pytest

from latfree.errors import ParseError, PreconditionError
from latfree.structures import (
    STRUCTURE_PRESETS,
    FVLStructure,
    StructureVLA,
    coordinatewise,
    f_algebra_probe,
    f_algebra_violation,
    hom_failures,
    inclusion,
    matrices,
    matrix_unit,
    rationals,
    structure_from_text,
    structure_to_text,
    unitise,
    vector_lattice,
    zero_product,
)
from latfree.theories import check_theory, theory
from latfree.vla import dual_numbers


def test_matrix_product():
    M = matrices(2)
    E11, E12, E21 = matrix_unit(2, 1, 1), matrix_unit(2, 1, 2), matrix_unit(2, 2, 1)
    assert M.mul(E11, E12) == E12
    assert M.mul(E12, E11) == M.zero()
    assert M.mul(E12, E21) == E11
    assert M.unit == (1, 0, 0, 1)
    assert M.is_positive_product()
    assert M.labels == ("E11", "E12", "E21", "E22")


def test_lattice_ops_are_coordinatewise():
    Q2 = coordinatewise(2)
    a, b = (Fraction(1), Fraction(-2)), (Fraction(0), Fraction(3))
    assert Q2.operate("vee", [a, b]) == (1, 3)
    assert Q2.operate("wedge", [a, b]) == (0, -2)
    assert Q2.operate("scale", [a], Fraction(-1, 2)) == (Fraction(-1, 2), 1)
    assert Q2.leq((0, -2), a)


@pytest.mark.parametrize("name", sorted(STRUCTURE_PRESETS))
def test_presets_satisfy_their_theory(name):
    A = STRUCTURE_PRESETS[name]()
    target = "VLA1P" if A.unit is not None else ("VLA" if A.with_product else "VL")
    assert check_theory(A, theory(target), samples=150).ok


def test_dual_numbers_unit_not_positive():
    D = dual_numbers()
    assert check_theory(D, theory("VLA1"), samples=200).ok
    rep = check_theory(D, theory("VLA1P"), samples=50)
    assert [v.label for v in rep.failures()] == ["(1+)"]


def test_text_round_trip():
    for A in (matrices(2), vector_lattice(3), zero_product(2), rationals()):
        B = structure_from_text(structure_to_text(A))
        assert (B.dim, B.unit, B.with_product) == (A.dim, A.unit, A.with_product)
        for i in range(A.dim):
            for j in range(A.dim):
                assert A.mul(A.basis(i), A.basis(j)) == B.mul(B.basis(i), B.basis(j)) if A.with_product else True
    with pytest.raises(ParseError):
        structure_from_text("dim 2\nmul 0 0\n")


def test_unitisation():
    U = unitise(zero_product(2))
    assert U.dim == 3
    assert check_theory(U, theory("VLA1P"), samples=200).ok
    assert hom_failures(inclusion(zero_product(2)), zero_product(2), U) == []
    U2 = unitise(matrices(2))
    assert U2.dim == 5 and check_theory(U2, theory("VLA1P"), samples=200).ok


def test_unitise_rejects_negative_product():
    bad = StructureVLA(1, [[{0: -1}]], name="negated")
    with pytest.raises(PreconditionError):
        unitise(bad)


def test_f_algebra_probe():
    assert f_algebra_probe(rationals()).holds
    assert f_algebra_probe(coordinatewise(2)).holds
    rep = f_algebra_probe(matrices(2))
    assert not rep.holds
    assert rep.witness["x"] == "E11" and rep.witness["y"] == "E12"
    assert "FAIL" in rep.line
    M = matrices(2)
    assert f_algebra_violation(M, matrix_unit(2, 1, 1), matrix_unit(2, 1, 2), matrix_unit(2, 1, 2)) is not None


def test_fvl_structure():
    W = FVLStructure(2)
    assert check_theory(W, theory("VLA"), samples=40).ok
