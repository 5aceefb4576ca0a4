"""Windowed formal delta functions with odd shifts."""

from math import comb

import pytest

from n2vosa.delta import (
    DeltaError,
    WindowedDelta,
    check_expansion,
    check_three_term,
    check_two_term,
    delta_expand,
    delta_spec,
    delta_substitution_check,
)
from n2vosa.grassmann import GrassmannElement
from n2vosa.superseries import SuperSeries

L = 4


def var(spec, name):
    return SuperSeries.var(spec, L, name)


def scalar(value):
    return GrassmannElement.scalar(L, value)


def test_binomial_table_without_odd_variables():
    spec = delta_spec(6, with_phis=False)
    series = delta_expand(WindowedDelta(var(spec, "x1") - var(spec, "x2"), "x0", (-6, 6), "x1"))
    assert series.coefficient({"x0": 0, "x1": 0, "x2": 0}) == scalar(1)
    for n in range(0, 4):
        for m in range(0, n + 1):
            expected = (-1) ** m * comb(n, m)
            assert series.coefficient({"x0": -n, "x1": n - m, "x2": m}) == scalar(expected)
    # n = -1: generalized binomial (-1 choose m) (-1)^m = 1
    for m in range(0, 3):
        assert series.coefficient({"x0": 1, "x1": -1 - m, "x2": m}) == scalar(1)


@pytest.mark.parametrize("with_phis", [False, True])
@pytest.mark.parametrize("order", [0, 1, 2])
def test_two_term(order, with_phis):
    assert check_two_term(9, order, with_phis).passed


@pytest.mark.parametrize("order", [0, 1, 2])
def test_three_term(order):
    assert check_three_term(9, order).passed


@pytest.mark.parametrize("power", [0, 1, 2])
def test_expansion(power):
    assert check_expansion(power, 9).passed


def test_sign_flipped_phi_term_is_detected():
    report = check_two_term(6, 0, negative_control=True)
    assert not report.passed and report.mismatches


def _substitution_inputs(window):
    spec = delta_spec(window)
    return spec, var(spec, "x1")


def test_substitution_rule():
    spec, x1 = _substitution_inputs(8)
    assert delta_substitution_check(x1).passed
    spec10 = delta_spec(10)
    assert delta_substitution_check(SuperSeries.monomial(spec10, L, {"x1": -1})).passed
    assert delta_substitution_check(SuperSeries.monomial(spec, L, {"x1": 2}, ("p1",))).passed


def test_window_guard():
    with pytest.raises(DeltaError):
        check_two_term(3)


def test_report_json_shape():
    data = check_two_term(6).to_json()
    assert set(data) == {"identity_id", "window", "safe_region", "mismatches", "pass"}
    assert data["pass"] is True
