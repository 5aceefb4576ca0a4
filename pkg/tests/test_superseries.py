"""Formal super Laurent series."""

import pytest

from n2vosa.expmap import flavor_spec
from n2vosa.grassmann import I, Scalar
from n2vosa.superseries import (
    SuperSeries,
    VariableSpec,
    ss_derive,
    ss_residue,
    ss_substitute,
    ss_taylor_shift,
)

L = 4
HOMO = flavor_spec("N2_homo")
NONHOMO = flavor_spec("N2_nonhomo")
TWO_POINT = VariableSpec.make(("x",), ("p1", "m1", "p2", "m2"), window=(-12, 12))


def mono(spec, power=0, odd=(), coeff=Scalar(1)):
    return SuperSeries.monomial(spec, L, {"x": power} if power else {}, odd, coeff)


def test_products():
    assert mono(HOMO, 1) * mono(HOMO, -1) == SuperSeries.one(HOMO, L)
    assert (mono(HOMO, 0, ("p", "m")) * mono(HOMO, 0, ("p",))).is_zero()
    pm = mono(HOMO, 0, ("p", "m"))
    assert (mono(HOMO, 1) - pm) * (mono(HOMO, 1) + pm) == mono(HOMO, 2)


def test_derivatives():
    assert ss_derive(mono(HOMO, 2), "x") == mono(HOMO, 1, coeff=Scalar(2))
    assert ss_derive(mono(HOMO, 0, ("p", "m")), "p") == mono(HOMO, 0, ("m",))
    assert ss_derive(mono(HOMO, 0, ("p", "m")), "m") == -mono(HOMO, 0, ("p",))


def test_taylor_shift():
    shift = mono(TWO_POINT, 0, ("p1", "m2"))
    assert ss_taylor_shift(mono(TWO_POINT, 1), "x", shift) == mono(TWO_POINT, 1) + shift
    shift = mono(TWO_POINT, 0, ("p1", "m2")) + mono(TWO_POINT, 0, ("m1", "p2"))
    expected = (
        mono(TWO_POINT, -1)
        - shift * mono(TWO_POINT, -2)
        + mono(TWO_POINT, -3, ("p1", "m1", "p2", "m2"), Scalar(2))
    )
    assert ss_taylor_shift(mono(TWO_POINT, -1), "x", shift) == expected


def test_substitution():
    spec = VariableSpec.make(("x", "x0"), (), window=(-8, 8))
    x = SuperSeries.var(spec, L, "x")
    x0 = SuperSeries.var(spec, L, "x0")
    assert ss_substitute(x * x, {"x": x + x0}) == x * x + (x * x0).scale(2) + x0 * x0
    r2_inv = Scalar(0, 1).inverse()
    target = VariableSpec.make(("x",), ("f1", "f2"), window=(-8, 8))
    image = (mono(target, 0, ("f1",)) + mono(target, 0, ("f2",), I)).scale(r2_inv)
    spec_p = VariableSpec.make(("x",), ("p", "m"), window=(-8, 8))
    conjugate = (mono(target, 0, ("f1",)) - mono(target, 0, ("f2",), I)).scale(r2_inv)
    assert ss_substitute(mono(spec_p, 0, ("p",)), {"p": image, "m": conjugate}, target) == image
    pm = mono(spec_p, 0, ("p", "m"))
    shifted = ss_substitute(mono(spec_p, -1), {"x": mono(spec_p, 1) - pm})
    assert shifted == mono(spec_p, -1) + mono(spec_p, -2, ("p", "m"))


def test_residue():
    odd_only = VariableSpec((), HOMO.odd_vars)
    assert ss_residue(mono(HOMO, -1), "x") == SuperSeries.one(odd_only, L)
    series = mono(HOMO, 2) + mono(HOMO, -1, ("p",), Scalar(3))
    assert ss_residue(series, "x") == SuperSeries.monomial(odd_only, L, {}, ("p",), Scalar(3))


def test_json_round_trip():
    series = mono(HOMO, -2, ("p",), Scalar(1, 2, 3)) + mono(HOMO, 5)
    assert SuperSeries.from_json(series.to_json()) == series


def test_unknown_variable_rejected():
    with pytest.raises(ValueError):
        SuperSeries.monomial(HOMO, L, {"y": 1})
