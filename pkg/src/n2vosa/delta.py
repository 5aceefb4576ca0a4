"""Windowed formal delta functions and exact checks of delta identities.

A delta ``delta^(k)(A / B)`` is materialized as
``sum_m falling(m + k, k) * A^m * B^(-m)`` over ``m`` in a finite window,
where ``A^m`` is expanded in nonnegative powers of everything except a
designated leading variable.  Identities are compared coefficient-wise on a
safe region: the window shrunk by ``k + 1`` on each side, further
intersected with the certificates the series arithmetic computes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .grassmann import ONE, Scalar
from .superseries import (
    SeriesError,
    SuperSeries,
    VariableSpec,
    compare_on_region,
    intersect_regions,
    shrink_region,
    ss_derive,
    ss_substitute,
)

MIN_WINDOW = 6
DEFAULT_GENERATORS = 4

# phi1+, phi1-, phi2+, phi2-
ODD_NAMES = ("p1", "m1", "p2", "m2")


class DeltaError(ValueError):
    """Raised when a delta argument cannot be expanded under the binomial convention."""


@dataclass(frozen=True)
class WindowedDelta:
    """``delta^(order)(numerator / (denominator_sign * denominator_var))`` on a window.

    ``leading_var`` is the even variable of the numerator that is kept to
    possibly negative powers; every other summand is expanded in
    nonnegative powers.
    """

    numerator: SuperSeries
    denominator_var: str
    window: Tuple[int, int]
    leading_var: str
    denominator_sign: int = 1
    order: int = 0


@dataclass
class DeltaReport:
    identity_id: str
    window: int
    safe_region: List[Tuple[int, int]]
    mismatches: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "window": self.window,
            "safe_region": [list(bound) for bound in self.safe_region],
            "mismatches": self.mismatches,
            "pass": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def delta_spec(window: int, even: Sequence[str] = ("x0", "x1", "x2"), with_phis: bool = True) -> VariableSpec:
    return VariableSpec.make(even, ODD_NAMES if with_phis else (), window=(-window, window))


def _falling(value: int, order: int) -> int:
    result = 1
    for j in range(order):
        result *= value - j
    return result


def _wide_spec(spec: VariableSpec, extra: int) -> VariableSpec:
    return VariableSpec(
        tuple((name, (low - extra, high + extra)) for name, (low, high) in spec.even_vars), spec.odd_vars
    )


def _ratio_powers(ratio: SuperSeries, needed: int) -> List[SuperSeries]:
    """ratio^0 .. ratio^K, where ratio^(K+1) clips to zero (its certificate is appended too)."""
    powers = [SuperSeries.one(ratio.spec, ratio.generator_count)]
    limit = needed
    while True:
        nxt = powers[-1] * ratio
        powers.append(nxt)
        if nxt.is_zero():
            return powers
        if len(powers) > limit:
            raise DeltaError("numerator not expandable within the window")


def delta_expand(delta: WindowedDelta) -> SuperSeries:
    """Materialize the windowed delta as a certified SuperSeries."""
    spec = delta.numerator.spec
    generator_count = delta.numerator.generator_count
    window_low, window_high = delta.window
    span = max(abs(low) + abs(high) for low, high in spec.windows) + max(abs(window_low), abs(window_high)) + delta.order
    wide = _wide_spec(spec, span)
    numerator = delta.numerator.reframe(wide)
    lead_index = spec.even_index(delta.leading_var)
    lead_exps = tuple(1 if k == lead_index else 0 for k in range(len(spec.even_vars)))
    lead_coeff = numerator._coefficient_by_mask(lead_exps, 0)
    if not lead_coeff.is_scalar() or lead_coeff.body().is_zero():
        raise DeltaError("leading variable must appear with an invertible scalar coefficient")
    lead_scalar = lead_coeff.body()
    lead = SuperSeries.monomial(wide, generator_count, {delta.leading_var: 1}, coeff=lead_scalar)
    rest = numerator - lead
    if rest.parity() not in (0,) or numerator.parity() not in (0,):
        raise DeltaError("numerator must be even")
    inverse_lead = SuperSeries.monomial(wide, generator_count, {delta.leading_var: -1}, coeff=lead_scalar.inverse())
    ratio = inverse_lead * rest
    if any(key[0][lead_index] >= 0 for key in ratio.raw_terms()):
        # every correction must lower the leading variable, otherwise powers do not truncate
        raise DeltaError("numerator not expandable under the binomial convention")
    powers = _ratio_powers(ratio, 4 * span + 8)
    tail_certificate = powers[-1]
    denominator_index = spec.even_index(delta.denominator_var)
    result = SuperSeries.zero(spec, generator_count)
    for power in range(window_low, window_high + 1):
        weight = _falling(power + delta.order, delta.order)
        if weight == 0:
            continue
        sign = delta.denominator_sign ** (power % 2)
        exps = {delta.leading_var: power}
        exps[delta.denominator_var] = exps.get(delta.denominator_var, 0) - power
        monomial = SuperSeries.monomial(wide, generator_count, exps, coeff=(lead_scalar ** power if power >= 0 else lead_scalar.inverse() ** (-power)) * (weight * sign))
        expansion = SuperSeries.zero(wide, generator_count)
        for k, ratio_power in enumerate(powers[:-1]):
            binom = _binomial(power, k)
            if binom:
                expansion = expansion + ratio_power.scale(binom)
        # the vanishing tail still carries a certificate
        expansion = expansion + tail_certificate
        result = result + (monomial * expansion).reframe(spec)
    denominator_safe = (-window_high, -window_low)
    safe = [(None, None)] * len(spec.even_vars)
    safe[denominator_index] = denominator_safe
    return result.with_safe(safe)


def _binomial(top: int, k: int) -> Fraction:
    result = Fraction(1)
    for j in range(k):
        result = result * (top - j) / (j + 1)
    return result


# ---------------------------------------------------------------------------
# Identity checks


def _variables(spec: VariableSpec, generator_count: int) -> Dict[str, SuperSeries]:
    return {name: SuperSeries.var(spec, generator_count, name) for name in spec.even_names + spec.odd_vars}


def phi_shift(spec: VariableSpec, generator_count: int) -> SuperSeries:
    """``phi1+ phi2- + phi1- phi2+`` (zero when the spec carries no odd variables)."""
    if not spec.odd_vars:
        return SuperSeries.zero(spec, generator_count)
    v = _variables(spec, generator_count)
    return v["p1"] * v["m2"] + v["m1"] * v["p2"]


def _monomial(spec: VariableSpec, generator_count: int, name: str, power: int, coeff=ONE) -> SuperSeries:
    return SuperSeries.monomial(spec, generator_count, {name: power}, coeff=coeff)


def _report(identity_id: str, window: int, lhs: SuperSeries, rhs: SuperSeries, shrink: int) -> DeltaReport:
    region = intersect_regions(
        shrink_region(lhs.spec.windows, shrink), lhs.safe_window, rhs.safe_window
    )
    return DeltaReport(identity_id, window, [tuple(r) for r in region], compare_on_region(lhs, rhs, region))


def _check_window(window: int) -> None:
    if window < MIN_WINDOW:
        raise DeltaError(f"window must be at least {MIN_WINDOW}")


def check_two_term(
    window: int = 12,
    order: int = 0,
    with_phis: bool = True,
    negative_control: bool = False,
    generator_count: int = DEFAULT_GENERATORS,
) -> DeltaReport:
    """``x1^(-k-1) d^k((x2+x0+s)/x1) = (-1)^k x2^(-k-1) d^k((x1-x0-s)/x2)`` with ``s`` the phi shift.

    ``negative_control`` flips the sign of the phi term on the right side, so
    the check must fail whenever odd variables are present.
    """
    _check_window(window)
    spec = delta_spec(window, with_phis=with_phis)
    v = _variables(spec, generator_count)
    shift = phi_shift(spec, generator_count)
    rhs_shift = -shift if negative_control else shift
    bounds = (-window, window)
    lhs_delta = delta_expand(WindowedDelta(v["x2"] + v["x0"] + shift, "x1", bounds, "x2", order=order))
    rhs_delta = delta_expand(WindowedDelta(v["x1"] - v["x0"] - rhs_shift, "x2", bounds, "x1", order=order))
    lhs = _monomial(spec, generator_count, "x1", -order - 1) * lhs_delta
    rhs = _monomial(spec, generator_count, "x2", -order - 1, coeff=(-1) ** order) * rhs_delta
    name = f"two_term_k{order}" + ("_phi" if with_phis else "") + ("_negative_control" if negative_control else "")
    return _report(name, window, lhs, rhs, order + 1)


def check_three_term(
    window: int = 12,
    order: int = 0,
    with_phis: bool = True,
    generator_count: int = DEFAULT_GENERATORS,
) -> DeltaReport:
    """``x0^(-k-1) d^k((x1-x2-s)/x0) - x0^(-k-1) d^k((x2-x1+s)/(-x0)) = x2^(-k-1) d^k((x1-x0-s)/x2)``."""
    _check_window(window)
    spec = delta_spec(window, with_phis=with_phis)
    v = _variables(spec, generator_count)
    shift = phi_shift(spec, generator_count)
    bounds = (-window, window)
    first = delta_expand(WindowedDelta(v["x1"] - v["x2"] - shift, "x0", bounds, "x1", order=order))
    second = delta_expand(WindowedDelta(v["x2"] - v["x1"] + shift, "x0", bounds, "x2", denominator_sign=-1, order=order))
    third = delta_expand(WindowedDelta(v["x1"] - v["x0"] - shift, "x2", bounds, "x1", order=order))
    prefactor = _monomial(spec, generator_count, "x0", -order - 1)
    lhs = prefactor * first - prefactor * second
    rhs = _monomial(spec, generator_count, "x2", -order - 1) * third
    name = f"three_term_k{order}" + ("_phi" if with_phis else "")
    return _report(name, window, lhs, rhs, order + 1)


def check_expansion(
    power: int,
    window: int = 12,
    with_phis: bool = True,
    generator_count: int = DEFAULT_GENERATORS,
) -> DeltaReport:
    """Difference of the two expansions of ``(x1 - x2 - s)^(-n-1)`` against the delta closed form."""
    _check_window(window)
    spec = VariableSpec.make(("x1", "x2"), ODD_NAMES if with_phis else (), window=(-window, window))
    v = _variables(spec, generator_count)
    shift = phi_shift(spec, generator_count)
    base = v["x1"] - v["x2"] - shift
    exponent = -power - 1
    lhs = _expand_power(base, "x1", exponent) - _expand_power(base, "x2", exponent)
    # (-1)^n / n! (d/dx1)^n x2^-1 delta((x1 - s)/x2)
    delta = delta_expand(WindowedDelta(v["x1"] - shift, "x2", (-window, window), "x1"))
    rhs = _monomial(spec, generator_count, "x2", -1) * delta
    for _ in range(power):
        rhs = ss_derive(rhs, "x1")
    factorial = 1
    for j in range(2, power + 1):
        factorial *= j
    rhs = rhs.scale(Fraction((-1) ** power, factorial))
    name = f"expansion_n{power}" + ("_phi" if with_phis else "")
    return _report(name, window, lhs, rhs, power + 1)


def _expand_power(base: SuperSeries, leading: str, exponent: int) -> SuperSeries:
    """``base^exponent`` with ``leading`` kept to negative powers (delta with order 0 at a single term)."""
    spec = base.spec
    generator_count = base.generator_count
    span = 2 * max(abs(low) + abs(high) for low, high in spec.windows)
    wide = _wide_spec(spec, span)
    wide_base = base.reframe(wide)
    lead_index = spec.even_index(leading)
    lead_exps = tuple(1 if k == lead_index else 0 for k in range(len(spec.even_vars)))
    lead_scalar = wide_base._coefficient_by_mask(lead_exps, 0).body()
    lead = SuperSeries.monomial(wide, generator_count, {leading: 1}, coeff=lead_scalar)
    inverse_lead = SuperSeries.monomial(wide, generator_count, {leading: -1}, coeff=lead_scalar.inverse())
    ratio = inverse_lead * (wide_base - lead)
    powers = _ratio_powers(ratio, 4 * span + 8)
    expansion = powers[-1]
    for k, ratio_power in enumerate(powers[:-1]):
        binom = _binomial(exponent, k)
        if binom:
            expansion = expansion + ratio_power.scale(binom)
    scale = lead_scalar ** exponent if exponent >= 0 else lead_scalar.inverse() ** (-exponent)
    monomial = SuperSeries.monomial(wide, generator_count, {leading: exponent}, coeff=scale)
    return (monomial * expansion).reframe(spec)


def delta_substitution_check(
    series: SuperSeries, window: Optional[int] = None, identity_id: str = "delta_substitute"
) -> DeltaReport:
    """``delta((x2+x0+s)/x1) X(x1, ...) = delta((x2+x0+s)/x1) X(x2+x0+s, ...)``.

    ``series`` must live in the standard spec with even ``x0, x1, x2`` and
    odd ``p1, m1, p2, m2``.
    """
    spec = series.spec
    if spec.even_names != ("x0", "x1", "x2") or spec.odd_vars != ODD_NAMES:
        raise SeriesError("substitution check needs the spec (x0, x1, x2 | p1, m1, p2, m2)")
    window = window if window is not None else max(max(abs(low), abs(high)) for low, high in spec.windows)
    _check_window(window)
    generator_count = series.generator_count
    v = _variables(spec, generator_count)
    shift = phi_shift(spec, generator_count)
    argument = v["x2"] + v["x0"] + shift
    delta = delta_expand(WindowedDelta(argument, "x1", (-window, window), "x2"))
    substituted = ss_substitute(series, {"x1": argument}, spec, leading={"x1": {"x2": 1}})
    lhs = delta * series
    rhs = delta * substituted
    degree = 0
    for exps, _ in series.raw_terms():
        degree = max(degree, abs(exps[1]))
    return _report(identity_id, window, lhs, rhs, 1 + degree)
