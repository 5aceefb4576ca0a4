"""N=2 Neveu-Schwarz superalgebra in two bases."""

from fractions import Fraction

import pytest

from n2vosa.grassmann import GrassmannElement, I, Scalar
from n2vosa.ns_algebra import (
    HOMOGENEOUS,
    NONHOMOGENEOUS,
    Automorphism,
    NsElement,
    apply_automorphism,
    basis_convert,
    bracket_text,
    check_subalgebra_closure,
    parse_basis,
    parse_element,
    subalgebra,
    verify_conversion_homomorphism,
    verify_lie_superalgebra,
)

L = 4


def test_spot_values():
    assert bracket_text("J(2)", "J(-2)") == parse_element("2/3*d")
    assert bracket_text("G+(3/2)", "G-(-3/2)") == parse_element("2*L(0) + 3*J(0) + 2/3*d")
    assert bracket_text("G1(1/2)", "G2(-1/2)") == parse_element("-i*J(0)", NONHOMOGENEOUS)


def test_virasoro_central_term():
    # [L_m, L_{-m}] = 2m L_0 + (m^3 - m)/12 d
    value = bracket_text("L(2)", "L(-2)")
    assert value == parse_element("4*L(0) + 1/2*d")


def test_basis_conversion_of_g_plus():
    r2_inverse = Scalar(0, Fraction(1, 2))
    element = NsElement.basis(parse_basis("G+(1/2)"), L)
    expected = parse_element("G1(1/2) - i*G2(1/2)", NONHOMOGENEOUS).scale(r2_inverse)
    assert basis_convert(element, NONHOMOGENEOUS) == expected


def test_conversion_fixes_even_generators_and_round_trips():
    element = parse_element("L(3)")
    assert basis_convert(element, NONHOMOGENEOUS) == parse_element("L(3)", NONHOMOGENEOUS)
    mixed = parse_element("2*L(1) - i*J(-2) + G+(5/2) + r2*G-(-1/2) + d")
    assert basis_convert(basis_convert(mixed, NONHOMOGENEOUS), HOMOGENEOUS) == mixed


@pytest.mark.parametrize("basis", [HOMOGENEOUS, NONHOMOGENEOUS])
def test_lie_superalgebra_axioms(basis):
    assert verify_lie_superalgebra(basis, (-3, 3))["pass"]


def test_conversion_homomorphism():
    assert verify_conversion_homomorphism((-2, 2))["pass"]


def test_subalgebras():
    negative = set(subalgebra("osp22_neg"))
    assert negative == {parse_basis("L(-1)"), parse_basis("G+(-1/2)"), parse_basis("G-(-1/2)")}
    n1 = subalgebra("N1_j1", NONHOMOGENEOUS, (-1, 1))
    assert parse_basis("G1(1/2)", NONHOMOGENEOUS) in n1 and parse_basis("d", NONHOMOGENEOUS) in n1
    for kind in ("osp12_neg", "osp12", "osp22_neg", "osp22", "N1_j1", "N1_j2"):
        assert check_subalgebra_closure(kind, HOMOGENEOUS, (-3, 3))["pass"], kind


@pytest.mark.parametrize("kind", ["scale", "flip", "flip_scale"])
@pytest.mark.parametrize("basis", [HOMOGENEOUS, NONHOMOGENEOUS])
def test_automorphisms_preserve_brackets(kind, basis):
    parameter = None if kind == "flip" else GrassmannElement.parse("2 + t1*t2", L)
    auto = Automorphism(kind, parameter)
    texts = ("G+(1/2)", "G-(-3/2)", "J(1)", "L(-1)") if basis == HOMOGENEOUS else ("G1(1/2)", "G2(-3/2)", "J(1)", "L(-1)")
    elements = [parse_element(text, basis) for text in texts]
    from n2vosa.ns_algebra import ns_bracket

    for u in elements:
        for v in elements:
            lhs = apply_automorphism(ns_bracket(u, v), auto)
            rhs = ns_bracket(apply_automorphism(u, auto), apply_automorphism(v, auto))
            assert lhs == rhs, (u, v)


def test_parity_mismatch_rejected():
    with pytest.raises(Exception):
        parse_basis("G+(1)")
    assert I * I == Scalar(-1)
