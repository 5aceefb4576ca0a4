"""Superderivation representations of the Neveu-Schwarz algebra."""

import pytest

from n2vosa.grassmann import GrassmannElement, I, Scalar
from n2vosa.superderiv import (
    SuperDerivation,
    check_d_family_brackets,
    check_deformed_square,
    check_j0_extensions,
    check_one_var_spanning,
    d_operator,
    deformed_d,
    family_spec,
    is_superconformal,
    make_rep,
    probe_basis,
    sd_commutator,
    verify_rep,
)
from n2vosa.superseries import SuperSeries

L = 4


def series(spec, power=0, odd=(), coeff=Scalar(1)):
    return SuperSeries.monomial(spec, L, {"x": power} if power else {}, odd, coeff)


def partial(spec, name, coeff=None):
    return SuperDerivation.partial(spec, L, name, coeff)


def test_d_plus_d_minus_bracket():
    spec = family_spec("homo2")
    d_plus = d_operator(spec, L, "D+")
    d_minus = d_operator(spec, L, "D-")
    assert sd_commutator(d_plus, d_minus) == partial(spec, "x").scale(2)
    assert sd_commutator(d_plus, d_plus).is_zero()


def test_deformed_square_bracket():
    spec = family_spec("n1_Ds")
    operator = deformed_d(spec, L, GrassmannElement.parse("1 + t1*t2", L), GrassmannElement.parse("t1", L))
    assert sd_commutator(operator, operator) == partial(spec, "x").scale(2)


def test_one_variable_j_and_g2():
    spec = family_spec("n2_one_var")
    for n in (-2, 0, 3):
        assert make_rep("n2_one_var", "J", n) == partial(spec, "f", series(spec, n, ("f",)))
        expected = (partial(spec, "f", series(spec, n)) + partial(spec, "x", series(spec, n, ("f",)))).scale(I)
        assert make_rep("n2_one_var", "G2", n) == expected


def test_deformed_g():
    spec = family_spec("n1_Ds")
    s = Scalar(3)
    for n in (-1, 0, 2):
        expected = -(partial(spec, "f", series(spec, n, coeff=s.inverse())) - partial(spec, "x", series(spec, n, ("f",), s)))
        assert make_rep("n1_Ds", "G", n, s=3) == expected


@pytest.mark.parametrize(
    "family,s",
    [("homo2", None), ("nonhomo2", None), ("n1_superconformal", None), ("n1_Ds", 3), ("n1_Ds", "1+t1*t2"), ("n2_one_var", None)],
)
def test_representation_relations(family, s):
    assert verify_rep(family, (-2, 2), s)["pass"]


def test_auxiliary_representation_checks():
    assert check_d_family_brackets()["pass"]
    assert check_one_var_spanning((-2, 2))["pass"]
    assert check_j0_extensions((-2, 2))["pass"]


@pytest.mark.parametrize("s,sigma", [(1, 0), (3, 0), ("1+t1*t2", "t1"), (2, "t1+t2")])
def test_deformed_square(s, sigma):
    assert check_deformed_square(s, sigma)["pass"]


def _constant(spec, text):
    return SuperSeries.constant(spec, L, GrassmannElement.parse(text, L))


def test_two_point_difference_is_superconformal():
    spec = family_spec("homo2")
    # second point: x2 = 5, phi2+ = t1, phi2- = t2
    x = series(spec, 1)
    p, m = series(spec, 0, ("p",)), series(spec, 0, ("m",))
    t1, t2 = _constant(spec, "t1"), _constant(spec, "t2")
    coordinate_map = (x - _constant(spec, "5") - p * t2 - m * t1, p - t1, m - t2)
    assert is_superconformal(coordinate_map, "homo2")


def test_scaling_odd_variable():
    spec = family_spec("n1_Ds")
    coordinate_map = (series(spec, 1), series(spec, 0, ("f",), Scalar(3)))
    assert not is_superconformal(coordinate_map, "n1")
    # (x, c phi): D_s x - s(c phi) D_s(s c phi) = s phi - s c^2 phi, so c = 3, s = 3 leaves -24 phi
    result = is_superconformal(coordinate_map, "n1_Ds", s=3)
    (residual,) = result.residuals.values()
    assert residual == series(spec, 0, ("f",), Scalar(-24))
    identity = (series(spec, 1), series(spec, 0, ("f",)))
    for s in (3, "1+t1*t2"):
        assert is_superconformal(identity, "n1_Ds", s=s)


@pytest.mark.parametrize("flavor", ["homo2", "nonhomo2", "n1"])
def test_identity_is_superconformal(flavor):
    family = {"homo2": "homo2", "nonhomo2": "nonhomo2", "n1": "n1_Ds"}[flavor]
    spec = family_spec(family)
    identity = tuple(SuperSeries.var(spec, L, name) for name in spec.even_names + spec.odd_vars)
    assert is_superconformal(identity, flavor)


def test_probe_basis_is_nonempty():
    assert probe_basis(family_spec("homo2"), L)
