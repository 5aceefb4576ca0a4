"""Weight-truncated polynomial kernel used by the exponential map.

Polynomials are dicts ``(k, mask) -> (numerator, denominator)`` where ``k`` is
the exponent of ``x``, ``mask`` is the combined odd mask of the super series
storage (formal odd variables in the low bits, Grassmann generators above)
and the coefficient is an element of Q[i, sqrt2] stored as four integer
numerators over a common positive denominator.  Products skip every pair
whose weight exceeds the bound, and accumulate numerators per denominator so
that reduction happens once per output term.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Tuple

from .grassmann import Scalar, merge_sign
from .superseries import SuperSeries, VariableSpec

Num = Tuple[int, int, int, int]
Coeff = Tuple[Num, int]
Poly = Dict[Tuple[int, int], Coeff]

_SIGN_CACHE: Dict[Tuple[int, int], int] = {}


def _sign(left: int, right: int) -> int:
    key = (left, right)
    value = _SIGN_CACHE.get(key)
    if value is None:
        value = merge_sign(left, right)
        _SIGN_CACHE[key] = value
    return value


def _normalize(num: Num, den: int) -> Optional[Coeff]:
    if not any(num):
        return None
    divisor = gcd(num[0], num[1], num[2], num[3], den)
    if divisor != 1:
        num = (num[0] // divisor, num[1] // divisor, num[2] // divisor, num[3] // divisor)
        den //= divisor
    return num, den


def _finalize(accumulator: Dict[Tuple[int, int], Dict[int, List[int]]]) -> Poly:
    result: Poly = {}
    for key, by_den in accumulator.items():
        if len(by_den) == 1:
            (den, num), = by_den.items()
            value = _normalize((num[0], num[1], num[2], num[3]), den)
        else:
            common = 1
            for den in by_den:
                common = common * den // gcd(common, den)
            total = [0, 0, 0, 0]
            for den, num in by_den.items():
                factor = common // den
                total[0] += num[0] * factor
                total[1] += num[1] * factor
                total[2] += num[2] * factor
                total[3] += num[3] * factor
            value = _normalize((total[0], total[1], total[2], total[3]), common)
        if value is not None:
            result[key] = value
    return result


def _accumulate(accumulator, key, num: Num, den: int, negate: bool) -> None:
    by_den = accumulator.get(key)
    if by_den is None:
        by_den = accumulator[key] = {}
    slot = by_den.get(den)
    if slot is None:
        if negate:
            by_den[den] = [-num[0], -num[1], -num[2], -num[3]]
        else:
            by_den[den] = [num[0], num[1], num[2], num[3]]
        return
    if negate:
        slot[0] -= num[0]
        slot[1] -= num[1]
        slot[2] -= num[2]
        slot[3] -= num[3]
    else:
        slot[0] += num[0]
        slot[1] += num[1]
        slot[2] += num[2]
        slot[3] += num[3]


def _product(n1: Num, n2: Num) -> Num:
    a1, b1, c1, d1 = n1
    a2, b2, c2, d2 = n2
    if not (b1 or d1 or b2 or d2):
        return (a1 * a2 - c1 * c2, 0, a1 * c2 + c1 * a2, 0)
    return (
        a1 * a2 + 2 * b1 * b2 - c1 * c2 - 2 * d1 * d2,
        a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2,
        a1 * c2 + c1 * a2 + 2 * b1 * d2 + 2 * d1 * b2,
        a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
    )


class Kernel:
    """Arithmetic for one number of formal odd variables and one locus."""

    def __init__(self, odd_count: int, locus: str):
        self.odd_count = odd_count
        self.low_mask = (1 << odd_count) - 1
        self.direction = 1 if locus == "zero" else -1

    # weights ------------------------------------------------------------------

    def weight(self, k: int, mask: int) -> int:
        return self.direction * (2 * k + (mask & self.low_mask).bit_count())

    def truncate(self, poly: Poly, bound: int) -> Poly:
        return {key: value for key, value in poly.items() if self.weight(*key) <= bound}

    def slice(self, poly: Poly, level: int) -> Poly:
        return {key: value for key, value in poly.items() if self.weight(*key) == level}

    def min_weight(self, poly: Poly) -> Optional[int]:
        return min((self.weight(*key) for key in poly), default=None)

    # conversions --------------------------------------------------------------

    @staticmethod
    def from_series(series: SuperSeries) -> Poly:
        return {(exps[0], mask): (coeff._num, coeff._den) for (exps, mask), coeff in series.raw_terms().items()}

    @staticmethod
    def to_series(poly: Poly, spec: VariableSpec, generator_count: int) -> SuperSeries:
        terms = {((k,), mask): Scalar._raw(num, den) for (k, mask), (num, den) in poly.items()}
        return SuperSeries(spec, generator_count, terms)

    def constant(self, element) -> Poly:
        """A Grassmann element as a polynomial (generators shifted above the formal bits)."""
        return {(0, mask << self.odd_count): (coeff._num, coeff._den) for mask, coeff in element.mask_terms().items()}

    # arithmetic ---------------------------------------------------------------

    def add(self, left: Poly, right: Poly, factor: int = 1) -> Poly:
        """``left + factor * right`` with an integer factor."""
        result = dict(left)
        for key, (num, den) in right.items():
            if factor != 1:
                num = (num[0] * factor, num[1] * factor, num[2] * factor, num[3] * factor)
            current = result.get(key)
            if current is None:
                result[key] = (num, den)
                continue
            cnum, cden = current
            common = cden * den // gcd(cden, den)
            f1, f2 = common // cden, common // den
            total = (
                cnum[0] * f1 + num[0] * f2,
                cnum[1] * f1 + num[1] * f2,
                cnum[2] * f1 + num[2] * f2,
                cnum[3] * f1 + num[3] * f2,
            )
            value = _normalize(total, common)
            if value is None:
                del result[key]
            else:
                result[key] = value
        return result

    def sub(self, left: Poly, right: Poly) -> Poly:
        return self.add(left, right, -1)

    def scale(self, poly: Poly, factor: Fraction) -> Poly:
        factor = Fraction(factor)
        result = {}
        for key, (num, den) in poly.items():
            p, q = factor.numerator, factor.denominator
            value = _normalize((num[0] * p, num[1] * p, num[2] * p, num[3] * p), den * q)
            if value is not None:
                result[key] = value
        return result

    def _sorted(self, poly: Poly):
        entries = [(self.weight(k, mask), k, mask, num, den) for (k, mask), (num, den) in poly.items()]
        entries.sort(key=lambda entry: entry[0])
        return entries

    def mul_into(self, accumulator, left: Poly, right: Poly, bound: Optional[int]) -> None:
        right_entries = self._sorted(right)
        if not right_entries:
            return
        weight = self.weight
        for (k1, m1), (n1, d1) in left.items():
            limit = None if bound is None else bound - weight(k1, m1)
            for w2, k2, m2, n2, d2 in right_entries:
                if limit is not None and w2 > limit:
                    break
                if m1 & m2:
                    continue
                sign = _sign(m1, m2)
                _accumulate(accumulator, (k1 + k2, m1 | m2), _product(n1, n2), d1 * d2, sign < 0)

    def mul(self, left: Poly, right: Poly, bound: Optional[int] = None) -> Poly:
        accumulator: Dict = {}
        self.mul_into(accumulator, left, right, bound)
        return _finalize(accumulator)

    # derivations --------------------------------------------------------------

    def derive(self, poly: Poly, variable: int) -> Poly:
        """Derivative in ``x`` (``variable = -1``) or left derivative in the odd variable with that index."""
        result: Poly = {}
        if variable < 0:
            for (k, mask), (num, den) in poly.items():
                if k == 0:
                    continue
                result[(k - 1, mask)] = ((num[0] * k, num[1] * k, num[2] * k, num[3] * k), den)
            return {key: _normalize(*value) for key, value in result.items()}
        bit = 1 << variable
        below = bit - 1
        for (k, mask), (num, den) in poly.items():
            if not mask & bit:
                continue
            if (mask & below).bit_count() & 1:
                num = (-num[0], -num[1], -num[2], -num[3])
            result[(k, mask ^ bit)] = (num, den)
        return result

    def apply(self, derivation: List[Tuple[int, Poly]], poly: Poly, bound: Optional[int]) -> Poly:
        """``sum_v c_v * d/dv`` applied to ``poly``, coefficients on the left."""
        accumulator: Dict = {}
        for variable, coefficient in derivation:
            derivative = self.derive(poly, variable)
            if derivative:
                self.mul_into(accumulator, coefficient, derivative, bound)
        return _finalize(accumulator)

    def exp(self, derivation: List[Tuple[int, Poly]], poly: Poly, bound: int, max_steps: int = 200) -> Poly:
        """``exp(T) poly`` truncated at ``bound``; ``T`` must raise the weight."""
        term = self.truncate(poly, bound)
        result = term
        k = 0
        while term:
            k += 1
            if k > max_steps:
                raise ValueError("exponential series did not terminate; derivation is not weight raising")
            term = self.scale(self.apply(derivation, term, bound), Fraction(1, k))
            result = self.add(result, term)
        return result
