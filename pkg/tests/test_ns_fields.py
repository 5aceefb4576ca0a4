"""Vertex operators of the N=2 superconformal vectors."""

from fractions import Fraction

import pytest

from n2vosa.grassmann import Scalar
from n2vosa.ns_algebra import HOMOGENEOUS, NONHOMOGENEOUS, NsElement, parse_element
from n2vosa.ns_fields import (
    HOMO,
    NONHOMO,
    ONE_VARIABLE,
    build_field,
    check_bracket_specializations,
    check_bracket_vs_ope,
    check_conjugation,
    check_derivative_property,
    check_reconstruction,
    dictionary_closure,
    extract_ns_relations,
    field_bracket,
    ope_rhs_mu,
    to_homogeneous,
    to_nonhomogeneous,
    weak_supercommutativity_mu,
)

WINDOW = 8


def mask_of(variables, names):
    mask = 0
    for name in names:
        mask |= 1 << variables.odd_names.index(name)
    return mask


def element(text, basis=HOMOGENEOUS):
    return parse_element(text, basis)


def mode(n):
    return f"({Fraction(2 * n + 1, 2)})"


@pytest.fixture(scope="module")
def mu():
    return build_field("mu", HOMO, WINDOW)


def test_printed_coefficients(mu):
    plus, minus = HOMO.odd_names
    tau = build_field("tau_plus", HOMO, WINDOW)
    omega = build_field("omega", HOMO, WINDOW)
    for n in (-2, 0, 1):
        assert mu.coefficient((-n - 2,), mask_of(HOMO, [plus])) == -element(f"G+{mode(n)}")
        assert tau.coefficient((-n - 2,), mask_of(HOMO, [minus])) == element(f"2*L({n}) + {n + 1}*J({n})")
        assert omega.coefficient((-n - 2,), 0) == element(f"L({n})")
    assert mu.coefficient((-1,), 0) == element("J(0)")


def test_vacuum_field_commutes(mu):
    vacuum = build_field("vac", HOMO, WINDOW)
    assert field_bracket(vacuum, mu).is_zero()


def test_current_commutator_central_term(mu):
    commutator = field_bracket(mu, mu)
    for m in (-2, 1, 2):
        # [J(m), J(-m)] = m/3 d sits at x1^(-m-1) x2^(m-1)
        value = commutator.coefficient((-m - 1, m - 1), 0)
        assert value == element(f"{m}/3*d")


def test_bracket_matches_ope():
    assert check_bracket_vs_ope(WINDOW, HOMOGENEOUS).passed


def test_ns_relations_from_residues(mu):
    report = extract_ns_relations(ope_rhs_mu(WINDOW), mu, (-2, 2))
    assert report.passed


@pytest.mark.parametrize("label", ["vac", "mu", "tau_plus", "tau_minus", "omega"])
@pytest.mark.parametrize("which", ["Dplus", "Dminus", "D"])
def test_derivative_properties(label, which):
    assert check_derivative_property(label, which, HOMO, WINDOW).passed


def test_dictionary_images():
    closure = dictionary_closure(HOMOGENEOUS)
    # [G-(-1/2), G+(-3/2)] = 2L(-2) - J(-2) on the vacuum, with J(-2) 1 = L(-1) mu
    assert closure["G-(-1/2) tau_plus"] == "(-1)*Lm1_mu + (2)*omega"
    assert closure["G+(-1/2) mu"] == "(-1)*tau_plus"
    assert closure["L(-1) vac"] == "0"


@pytest.mark.parametrize("label", ["vac", "mu", "omega"])
def test_bracket_specializations(label):
    assert all(report.passed for report in check_bracket_specializations(label, HOMO, WINDOW))


@pytest.mark.parametrize("operator", ["L0", "J0"])
@pytest.mark.parametrize("variables,label", [(HOMO, "mu"), (HOMO, "tau_plus"), (NONHOMO, "mu"), (NONHOMO, "tau1")])
def test_conjugation(operator, variables, label):
    assert check_conjugation(label, operator, Scalar(2), variables, WINDOW).passed


def test_conjugation_with_unit_parameter_is_trivial():
    assert check_conjugation("omega", "J0", Scalar(1), HOMO, WINDOW).passed


@pytest.mark.parametrize("variables,label", [(HOMO, "mu"), (HOMO, "vac"), (NONHOMO, "mu"), (ONE_VARIABLE, "mu")])
def test_reconstruction(variables, label):
    assert check_reconstruction(label, variables, WINDOW).passed


def test_flavor_change(mu):
    nonhomo = to_nonhomogeneous(mu)
    assert nonhomo == build_field("mu", NONHOMO, WINDOW)
    one, two = NONHOMO.odd_names
    assert nonhomo.coefficient((-2,), mask_of(NONHOMO, [one])) == element("i*G2(1/2)", NONHOMOGENEOUS)
    assert to_homogeneous(nonhomo) == mu
    vacuum = build_field("vac", HOMO, WINDOW)
    assert to_nonhomogeneous(vacuum) == build_field("vac", NONHOMO, WINDOW)


def test_weak_supercommutativity():
    assert weak_supercommutativity_mu(4, 10).passed
    assert not weak_supercommutativity_mu(1, 10).passed
    assert weak_supercommutativity_mu(1, 10, label="vac").passed


def test_json_shape(mu):
    data = mu.to_json()
    assert data["label"] == "mu"
