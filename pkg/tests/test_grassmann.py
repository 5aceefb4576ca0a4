"""Grassmann algebra over Q[i, sqrt2]."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from n2vosa.grassmann import (
    GrassmannElement,
    I,
    Scalar,
    body_soul,
    check_kernel,
    gr_inverse,
    gr_mul,
)

L = 4


def elem(text: str, generators: int = L) -> GrassmannElement:
    return GrassmannElement.parse(text, generators)


def test_distinct_generators_anticommute():
    t1, t2 = elem("t1"), elem("t2")
    assert gr_mul(t1, t2) == elem("t1*t2")
    assert gr_mul(t2, t1) == -elem("t1*t2")


def test_generator_squares_to_zero():
    assert gr_mul(elem("t1"), elem("t1")).is_zero()


def test_nilpotent_cancellation():
    assert elem("1 + t1*t2") * elem("1 - t1*t2") == GrassmannElement.one(L)


def test_inverse_values():
    assert gr_inverse(GrassmannElement.one(L)) == GrassmannElement.one(L)
    a = elem("2 + t1*t2")
    inverse = gr_inverse(a)
    assert inverse == elem("1/2 - 1/4*t1*t2")
    assert a * inverse == GrassmannElement.one(L)


def test_inverse_of_pure_soul_is_an_error():
    with pytest.raises(ZeroDivisionError):
        gr_inverse(elem("t1"))


def test_body_soul_split():
    body, soul = body_soul(elem("3 + t1"))
    assert body == Scalar(3) and soul == elem("t1")
    body, soul = body_soul(GrassmannElement.zero(L))
    assert body.is_zero() and soul.is_zero()
    pure = elem("i*r2*t1*t2*t3")
    body, soul = body_soul(pure)
    assert body.is_zero() and soul == pure


def test_scalar_field_arithmetic():
    r2 = Scalar(0, 1)
    assert r2 * r2 == Scalar(2)
    assert I * I == Scalar(-1)
    x = Scalar(Fraction(1, 3), 2, -1, Fraction(1, 2))
    assert x * x.inverse() == Scalar(1)


def test_parity_of_homogeneous_parts():
    a = elem("1 + t1 + t1*t2")
    assert a.even_part().parity() == 0
    assert a.odd_part().parity() == 1
    assert a.parity() is None


def test_generator_count_guard():
    with pytest.raises(ValueError):
        GrassmannElement.one(9)


@pytest.mark.parametrize("generators", [2, 4, 6])
def test_kernel_sweep(generators):
    assert check_kernel(0, generators)["pass"]


masks = st.integers(min_value=0, max_value=(1 << L) - 1)
coefficients = st.integers(min_value=-4, max_value=4)
elements = st.dictionaries(masks, coefficients, max_size=6).map(
    lambda terms: GrassmannElement._from_masks(L, {m: Scalar(c) for m, c in terms.items() if c})
)


@settings(max_examples=60, deadline=None)
@given(elements, elements, elements)
def test_multiplication_is_associative_and_distributive(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(elements)
def test_invertible_elements_have_two_sided_inverse(a):
    a = a + GrassmannElement.one(L) if a.body().is_zero() else a
    inverse = a.inverse()
    assert a * inverse == GrassmannElement.one(L) == inverse * a
