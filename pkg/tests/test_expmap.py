"""Formal exponentials of infinitesimal data, extraction and composition laws."""

from fractions import Fraction

import pytest

from n2vosa.expmap import (
    CoordMap,
    ExpMapError,
    InfinitesimalData,
    _substitute_truncated,
    _switch_map,
    compose,
    composition_switch_check,
    exp_apply,
    extract,
    flavor_spec,
    grading_images,
    group_law_check,
    hat_e,
    hatE1,
    hatE2,
    check_isomorphism,
    inverse_element,
    is_superconformal_map,
    random_infinitesimal_data,
    restricted_shape_violation,
    weight_filtration_check,
)
from n2vosa.grassmann import GrassmannElement, Scalar
from n2vosa.superderiv import SuperDerivation
from n2vosa.superseries import SuperSeries

L = 4


def grass(text):
    return GrassmannElement.parse(text, L)


def mono(flavor, power=0, odd=(), coeff=None):
    spec = flavor_spec(flavor)
    base = SuperSeries.monomial(spec, L, {"x": power} if power else {}, odd)
    return base if coeff is None else SuperSeries.constant(spec, L, coeff) * base


def grading(a, b, weight=4):
    return InfinitesimalData.grading(grass(a), grass(b), weight, L)


def test_exp_of_nilpotent_translation():
    spec = flavor_spec("N1")
    x, f = SuperSeries.var(spec, L, "x"), SuperSeries.var(spec, L, "f")
    shift = SuperSeries.constant(spec, L, grass("t1*t2"))
    T = SuperDerivation.partial(spec, L, "x", shift)
    assert exp_apply(T, (x, f), 4) == (x + shift, f)
    k = SuperSeries.constant(spec, L, grass("t1"))
    T = SuperDerivation.partial(spec, L, "x", k * f)
    assert exp_apply(T, (x, f), 4) == (x + k * f, f)


def test_exp_rejects_non_nilpotent_lowering_operator():
    spec = flavor_spec("N1")
    x = SuperSeries.var(spec, L, "x")
    with pytest.raises(ExpMapError):
        exp_apply(SuperDerivation.partial(spec, L, "x", x), (x,), 4)


def test_grading_map_homogeneous():
    a, b = grass("2 + t1*t2"), grass("3")
    f = hatE2(grading("2 + t1*t2", "3"), "homo")
    expected = (
        mono("N2_homo", 1, coeff=a * a),
        mono("N2_homo", 0, ("p",), a * b),
        mono("N2_homo", 0, ("m",), a * b.inverse()),
    )
    assert f.components == expected


@pytest.mark.parametrize("flavor", ["N2_homo", "N2_nonhomo", "N1"])
def test_identity_data_gives_identity_map(flavor):
    assert hat_e(InfinitesimalData.identity(4, L), flavor) == CoordMap.identity(flavor, L)


def test_single_j_coefficient_in_one_variable_map():
    # exp(-A x phi d/dphi) phi = phi (1 - A x + A^2 x^2 / 2 - ...)
    A = Fraction(2)
    g = InfinitesimalData(grass("1"), grass("1"), (), (GrassmannElement.scalar(L, A),), (), (), 4)
    odd = hatE1(g).components[1]
    factorial = 1
    for k in range(0, 3):
        factorial *= max(k, 1)
        expected = GrassmannElement.scalar(L, (-A) ** k / factorial)
        assert odd.coefficient({"x": k}, ("f",)) == expected


def test_extract_grading_map():
    f = CoordMap(
        "N2_homo",
        (mono("N2_homo", 1, coeff=grass("4")), mono("N2_homo", 0, ("p",), grass("6")), mono("N2_homo", 0, ("m",), grass("2/3"))),
    )
    assert extract(f, "E2_homo", 4) == grading("2", "3")
    assert extract(CoordMap.identity("N2_homo", L), "E2_homo", 4).is_identity()


@pytest.mark.parametrize("target,flavor", [("E2_homo", "N2_homo"), ("E2_nonhomo", "N2_nonhomo"), ("E1", "N1")])
def test_extract_inverts_exponential(target, flavor):
    for seed in range(3):
        g = random_infinitesimal_data(seed, 5, L)
        f = hat_e(g, flavor, "zero", 5)
        assert extract(f, target, 5) == g
        if flavor == "N1":
            assert restricted_shape_violation(f) is None
        else:
            assert is_superconformal_map(f, 5)


def test_extract_at_infinity():
    g = random_infinitesimal_data(11, 4, L)
    assert extract(hat_e(g, "N2_nonhomo", "infinity", 4), "E2_nonhomo", 4) == g


def test_grading_product_closed_form():
    # (a^2 x, ab phi+, a/b phi-) composed with (a'^2 x, ...) is the grading of (a a', b b')
    product = compose(grading("2", "3"), grading("5", "7"), "zero", "N2", 4, "homo")
    assert product == grading("10", "21")


def test_canonical_sign_of_grading_pair():
    assert grading("-2", "-3") == grading("2", "3")


@pytest.mark.parametrize("law", ["N2", "N1"])
def test_zero_locus_group_law(law):
    elements = [random_infinitesimal_data(seed, 4, L) for seed in range(3)]
    assert group_law_check(elements, "zero", law, 4)["pass"]


@pytest.mark.parametrize("law", ["N2", "N1"])
def test_consistent_infinity_group_law(law):
    elements = [random_infinitesimal_data(seed, 4, L) for seed in range(3)]
    assert group_law_check(elements, "infinity", law, 4, convention="consistent")["pass"]


def test_printed_infinity_law_is_the_untwisted_zero_law():
    g, h = random_infinitesimal_data(1, 4, L), random_infinitesimal_data(2, 4, L)
    printed = compose(g, h, "infinity", "N2", 4)
    assert printed == compose(g, h, "zero", "N2", 4).untwisted()


def test_inverse_round_trip():
    g = random_infinitesimal_data(5, 4, L)
    identity = InfinitesimalData.identity(4, L)
    inverse = inverse_element(g, "zero", "N2", 4)
    assert compose(g, inverse, "zero", "N2", 4) == identity


@pytest.mark.parametrize("locus,weight", [("zero", 5), ("infinity", 4)])
def test_isomorphism(locus, weight):
    identity = InfinitesimalData.identity(weight, L)
    assert check_isomorphism(identity, identity, locus, weight)["equal"]
    g, h = random_infinitesimal_data(3, weight, L), random_infinitesimal_data(4, weight, L)
    assert check_isomorphism(g, h, locus, weight)["equal"]


def _n1(power, odd=()):
    return mono("N1", power, odd)


@pytest.mark.parametrize(
    "f1",
    [
        (_n1(1), _n1(0, ("f",))),
        (_n1(2) + _n1(0, ("f",)), _n1(0, ("f",))),
        (_n1(2) + _n1(-1), _n1(1, ("f",))),
    ],
)
def test_composition_switch(f1):
    g = random_infinitesimal_data(8, 4, L)
    assert composition_switch_check(f1, g, 4)["pass"]


def test_composition_switch_detects_wrong_inner_map():
    g = random_infinitesimal_data(8, 4, L)
    other = random_infinitesimal_data(9, 4, L)
    f1 = (_n1(2), _n1(0, ("f",)))
    wrong = _switch_map(other, "N1", "zero", 12)
    left = _substitute_truncated(f1[0], wrong, "N1", "zero", 8)
    from n2vosa.expmap import exp_series, infinitesimal_derivation, substitute_linear

    images = grading_images("N1", "zero", g.a0_1, g.a0_2)
    right = exp_series(infinitesimal_derivation(g, "N1", "zero"), substitute_linear(f1[0], images), 8)
    assert left != right


def test_weight_filtration():
    assert weight_filtration_check(random_infinitesimal_data(2, 4, L), "N2_nonhomo")


def test_json_round_trips():
    g = random_infinitesimal_data(4, 4, L)
    assert InfinitesimalData.from_json(g.to_json(), L) == g
    f = hat_e(g, "N2_homo")
    assert CoordMap.from_json(f.to_json()) == f


def test_weight_guard():
    with pytest.raises(ExpMapError):
        InfinitesimalData.identity(9, L)
