"""Truncated formal Laurent series with even and odd formal variables.

A :class:`SuperSeries` stores monomials ``phi^S * theta^T * x^e`` where
``phi^S`` is an ascending product of odd formal variables written to the
left of the Grassmann coefficient ``theta^T``.  Internally both odd parts
are packed into one bitmask (formal variables in the low bits, Grassmann
generators above them), so every sign comes from
:func:`n2vosa.grassmann.merge_sign`.

Each even variable has a storage window and a certified ``safe`` interval.
A bound of ``None`` means the series is exact in that direction: it has no
terms beyond the stored ones.  An integer bound means coefficients past it
may be missing.  Products and substitutions compute these certificates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .grassmann import (
    ONE,
    ZERO,
    GrassmannElement,
    Scalar,
    mask_to_subset,
    merge_sign,
    popcount,
    subset_to_mask,
)

DEFAULT_WINDOW = (-12, 12)
INF = float("inf")

Key = Tuple[Tuple[int, ...], int]


class SeriesError(ValueError):
    """Raised for incompatible specs, unknown variables and uncertified operations."""


@dataclass(frozen=True)
class VariableSpec:
    """Even variables with exponent windows plus an ordered list of odd variables."""

    even_vars: Tuple[Tuple[str, Tuple[int, int]], ...]
    odd_vars: Tuple[str, ...] = ()

    def __post_init__(self):
        names = [name for name, _ in self.even_vars]
        if len(set(names)) != len(names) or len(set(self.odd_vars)) != len(self.odd_vars):
            raise SeriesError("duplicate variable names")
        if set(names) & set(self.odd_vars):
            raise SeriesError("odd variable names must differ from even names")
        for _, (low, high) in self.even_vars:
            if low > high:
                raise SeriesError("empty window")

    @classmethod
    def make(
        cls,
        even: Iterable[Union[str, Tuple[str, Tuple[int, int]]]],
        odd: Iterable[str] = (),
        window: Tuple[int, int] = DEFAULT_WINDOW,
    ) -> "VariableSpec":
        even_vars = []
        for entry in even:
            if isinstance(entry, str):
                even_vars.append((entry, tuple(window)))
            else:
                name, win = entry
                even_vars.append((name, tuple(win)))
        return cls(tuple(even_vars), tuple(odd))

    @property
    def even_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.even_vars)

    @property
    def windows(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(win for _, win in self.even_vars)

    def even_index(self, name: str) -> int:
        try:
            return self.even_names.index(name)
        except ValueError:
            raise SeriesError(f"unknown even variable {name!r}") from None

    def odd_index(self, name: str) -> int:
        try:
            return self.odd_vars.index(name)
        except ValueError:
            raise SeriesError(f"unknown odd variable {name!r}") from None

    def has(self, name: str) -> bool:
        return name in self.even_names or name in self.odd_vars

    def same_names(self, other: "VariableSpec") -> bool:
        return self.even_names == other.even_names and self.odd_vars == other.odd_vars

    def with_window(self, window: Tuple[int, int]) -> "VariableSpec":
        return VariableSpec(tuple((name, tuple(window)) for name in self.even_names), self.odd_vars)

    def to_json(self) -> dict:
        return {
            "even_vars": [[name, list(win)] for name, win in self.even_vars],
            "odd_vars": list(self.odd_vars),
        }

    @classmethod
    def from_json(cls, data: dict) -> "VariableSpec":
        return cls(
            tuple((name, tuple(win)) for name, win in data["even_vars"]),
            tuple(data.get("odd_vars", ())),
        )


def _combine_key(exps: Tuple[int, ...], mask: int) -> Key:
    return (exps, mask)


class SuperSeries:
    """Windowed super series with Grassmann coefficients and a safe-window certificate."""

    __slots__ = ("spec", "generator_count", "_terms", "_safe")

    def __init__(
        self,
        spec: VariableSpec,
        generator_count: int,
        terms: Optional[Dict[Key, Scalar]] = None,
        safe: Optional[Sequence[Tuple[Optional[int], Optional[int]]]] = None,
        _clean: bool = False,
    ):
        self.spec = spec
        self.generator_count = generator_count
        if safe is None:
            safe = tuple((None, None) for _ in spec.even_vars)
        self._safe = tuple(tuple(bound) for bound in safe)
        if _clean:
            self._terms = terms or {}
        else:
            self._terms = {}
            for key, coeff in (terms or {}).items():
                if not coeff.is_zero():
                    self._terms[key] = coeff
            self._clip()

    # construction ---------------------------------------------------------

    @property
    def odd_count(self) -> int:
        return len(self.spec.odd_vars)

    @classmethod
    def zero(cls, spec: VariableSpec, generator_count: int) -> "SuperSeries":
        return cls(spec, generator_count, {}, _clean=True)

    @classmethod
    def constant(cls, spec: VariableSpec, generator_count: int, value) -> "SuperSeries":
        if isinstance(value, GrassmannElement):
            if value.generator_count != generator_count:
                raise SeriesError("mismatched generator counts")
            shift = len(spec.odd_vars)
            zeros = tuple(0 for _ in spec.even_vars)
            terms = {(zeros, mask << shift): coeff for mask, coeff in value.items()}
            return cls(spec, generator_count, terms)
        value = Scalar.coerce(value)
        zeros = tuple(0 for _ in spec.even_vars)
        return cls(spec, generator_count, {(zeros, 0): value})

    @classmethod
    def one(cls, spec: VariableSpec, generator_count: int) -> "SuperSeries":
        return cls.constant(spec, generator_count, ONE)

    @classmethod
    def var(cls, spec: VariableSpec, generator_count: int, name: str) -> "SuperSeries":
        if name in spec.odd_vars:
            zeros = tuple(0 for _ in spec.even_vars)
            return cls(spec, generator_count, {(zeros, 1 << spec.odd_index(name)): ONE})
        index = spec.even_index(name)
        exps = tuple(1 if k == index else 0 for k in range(len(spec.even_vars)))
        return cls(spec, generator_count, {(exps, 0): ONE})

    @classmethod
    def monomial(
        cls,
        spec: VariableSpec,
        generator_count: int,
        exponents: Mapping[str, int] = None,
        odd: Sequence[str] = (),
        coeff=ONE,
    ) -> "SuperSeries":
        """``phi_odd[0] ... phi_odd[-1] * coeff * prod x^e`` with odd names in the given order."""
        exponents = dict(exponents or {})
        exps = tuple(exponents.pop(name, 0) for name in spec.even_names)
        if exponents:
            raise SeriesError(f"unknown even variables {sorted(exponents)}")
        mask, sign = subset_to_mask(spec.odd_index(name) + 1 for name in odd)
        if sign == 0:
            return cls.zero(spec, generator_count)
        base = cls(spec, generator_count, {(exps, mask): ONE if sign > 0 else -ONE})
        if isinstance(coeff, GrassmannElement):
            return base * cls.constant(spec, generator_count, coeff)
        return base.scale(coeff)

    # accessors ----------------------------------------------------------------

    def items(self):
        return self._terms.items()

    def raw_terms(self) -> Dict[Key, Scalar]:
        return dict(self._terms)

    @property
    def safe(self) -> Tuple[Tuple[Optional[int], Optional[int]], ...]:
        return self._safe

    @property
    def safe_window(self) -> Tuple[Tuple[int, int], ...]:
        """Per even variable, the certified sub-window of the storage window."""
        result = []
        for (low, high), (wlo, whi) in zip(self._safe, self.spec.windows):
            result.append((wlo if low is None else max(low, wlo), whi if high is None else min(high, whi)))
        return tuple(result)

    def is_exact(self) -> bool:
        return all(low is None and high is None for low, high in self._safe)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, exponents: Union[Mapping[str, int], Sequence[int]], odd: Sequence[str] = ()) -> GrassmannElement:
        """Grassmann coefficient of ``phi^odd * x^exponents`` (odd names in spec order)."""
        if isinstance(exponents, Mapping):
            exps = tuple(exponents.get(name, 0) for name in self.spec.even_names)
        else:
            exps = tuple(exponents)
        mask, sign = subset_to_mask(self.spec.odd_index(name) + 1 for name in odd)
        if sign == 0:
            return GrassmannElement.zero(self.generator_count)
        return self._coefficient_by_mask(exps, mask).scale(sign)

    def _coefficient_by_mask(self, exps: Tuple[int, ...], odd_mask: int) -> GrassmannElement:
        shift = self.odd_count
        low_mask = (1 << shift) - 1
        terms = {}
        for (key_exps, mask), coeff in self._terms.items():
            if key_exps == exps and mask & low_mask == odd_mask:
                terms[mask >> shift] = coeff
        return GrassmannElement._from_masks(self.generator_count, terms)

    def coefficients(self) -> Dict[Tuple[Tuple[int, ...], Tuple[str, ...]], GrassmannElement]:
        """Mapping (exponent vector, odd monomial names) to Grassmann coefficient."""
        shift = self.odd_count
        low_mask = (1 << shift) - 1
        grouped: Dict[Tuple[Tuple[int, ...], int], Dict[int, Scalar]] = {}
        for (exps, mask), coeff in self._terms.items():
            grouped.setdefault((exps, mask & low_mask), {})[mask >> shift] = coeff
        result = {}
        for (exps, odd_mask), terms in grouped.items():
            names = tuple(self.spec.odd_vars[index - 1] for index in mask_to_subset(odd_mask))
            result[(exps, names)] = GrassmannElement._from_masks(self.generator_count, terms)
        return result

    def odd_part_masks(self) -> set:
        low_mask = (1 << self.odd_count) - 1
        return {mask & low_mask for _, mask in self._terms}

    def parity(self) -> Optional[int]:
        parities = {popcount(mask) & 1 for _, mask in self._terms}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def exponent_range(self, name: str) -> Optional[Tuple[int, int]]:
        index = self.spec.even_index(name)
        values = [exps[index] for exps, _ in self._terms]
        if not values:
            return None
        return min(values), max(values)

    # internal helpers -----------------------------------------------------

    def _clip(self) -> None:
        windows = self.spec.windows
        if not windows:
            return
        safe = [list(bound) for bound in self._safe]
        dropped = []
        for key in self._terms:
            exps = key[0]
            for index, (wlo, whi) in enumerate(windows):
                value = exps[index]
                if value < wlo:
                    safe[index][0] = wlo if safe[index][0] is None else max(safe[index][0], wlo)
                    dropped.append(key)
                    break
                if value > whi:
                    safe[index][1] = whi if safe[index][1] is None else min(safe[index][1], whi)
                    dropped.append(key)
                    break
        for key in dropped:
            del self._terms[key]
        # a key dropped for one variable may also exceed another window
        if dropped:
            for key in dropped:
                exps = key[0]
                for index, (wlo, whi) in enumerate(windows):
                    if exps[index] < wlo:
                        safe[index][0] = wlo if safe[index][0] is None else max(safe[index][0], wlo)
                    if exps[index] > whi:
                        safe[index][1] = whi if safe[index][1] is None else min(safe[index][1], whi)
        self._safe = tuple(tuple(bound) for bound in safe)

    def _support_bounds(self) -> List[Tuple[float, float]]:
        """Per variable, bounds on the true support (infinite where uncertified)."""
        result = []
        for index, (low, high) in enumerate(self._safe):
            values = [exps[index] for exps, _ in self._terms]
            if low is None:
                support_low = min(values) if values else INF
            else:
                support_low = -INF
            if high is None:
                support_high = max(values) if values else -INF
            else:
                support_high = INF
            result.append((support_low, support_high))
        return result

    def _check_compatible(self, other: "SuperSeries") -> None:
        if not self.spec.same_names(other.spec):
            raise SeriesError("incompatible variable specs")
        if self.generator_count != other.generator_count:
            raise SeriesError("mismatched generator counts")

    def _result_spec(self, other: "SuperSeries") -> VariableSpec:
        if self.spec == other.spec:
            return self.spec
        windows = []
        for (name, (lo1, hi1)), (_, (lo2, hi2)) in zip(self.spec.even_vars, other.spec.even_vars):
            windows.append((name, (max(lo1, lo2), min(hi1, hi2))))
        return VariableSpec(tuple(windows), self.spec.odd_vars)

    def _new(self, terms: Dict[Key, Scalar], safe, spec: Optional[VariableSpec] = None, clean=True) -> "SuperSeries":
        result = SuperSeries(spec or self.spec, self.generator_count, terms, safe, _clean=True)
        if clean:
            result._clip()
        return result

    def reframe(self, spec: VariableSpec) -> "SuperSeries":
        """Same series viewed in a spec with other windows; clips and updates the certificate."""
        if not spec.same_names(self.spec):
            raise SeriesError("reframe needs the same variable names")
        return SuperSeries(spec, self.generator_count, dict(self._terms), self._safe)

    def with_safe(self, safe) -> "SuperSeries":
        """Copy with an explicitly tightened certificate (bounds are intersected)."""
        merged = []
        for (l1, h1), (l2, h2) in zip(self._safe, safe):
            low = None if l1 is None and l2 is None else max(v for v in (l1, l2) if v is not None)
            high = None if h1 is None and h2 is None else min(v for v in (h1, h2) if v is not None)
            merged.append((low, high))
        return self._new(dict(self._terms), merged, clean=False)

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "SuperSeries":
        if isinstance(other, SuperSeries):
            self._check_compatible(other)
            return other
        if isinstance(other, (Scalar, int, Fraction, GrassmannElement)):
            return SuperSeries.constant(self.spec, self.generator_count, other)
        raise TypeError(f"cannot combine SuperSeries with {type(other).__name__}")

    def __add__(self, other) -> "SuperSeries":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            total = terms.get(key)
            total = coeff if total is None else total + coeff
            if total.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = total
        safe = []
        for (l1, h1), (l2, h2) in zip(self._safe, other._safe):
            low = None if l1 is None and l2 is None else max(v for v in (l1, l2) if v is not None)
            high = None if h1 is None and h2 is None else min(v for v in (h1, h2) if v is not None)
            safe.append((low, high))
        return self._new(terms, safe, self._result_spec(other))

    __radd__ = __add__

    def __neg__(self) -> "SuperSeries":
        return self._new({k: -c for k, c in self._terms.items()}, self._safe, clean=False)

    def __sub__(self, other) -> "SuperSeries":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "SuperSeries":
        return (-self) + other

    def scale(self, factor) -> "SuperSeries":
        """Multiply by an exact scalar (which commutes with everything)."""
        factor = Scalar.coerce(factor)
        if factor.is_zero():
            return self._new({}, self._safe, clean=False)
        return self._new({k: c * factor for k, c in self._terms.items()}, self._safe, clean=False)

    def __mul__(self, other) -> "SuperSeries":
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return ss_mul(self, other)

    def __rmul__(self, other) -> "SuperSeries":
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        if isinstance(other, GrassmannElement):
            return ss_mul(SuperSeries.constant(self.spec, self.generator_count, other), self)
        return NotImplemented

    def __pow__(self, exponent: int) -> "SuperSeries":
        if exponent < 0:
            raise SeriesError("use ss_binomial or ss_substitute for negative powers")
        result = SuperSeries.one(self.spec, self.generator_count)
        for _ in range(exponent):
            result = result * self
        return result

    # comparison ---------------------------------------------------------------

    def filter(self, keep) -> "SuperSeries":
        """Keep terms for which ``keep(exps, odd_mask)`` is true; certificate unchanged."""
        shift_mask = (1 << self.odd_count) - 1
        terms = {k: c for k, c in self._terms.items() if keep(k[0], k[1] & shift_mask)}
        return self._new(terms, self._safe, clean=False)

    def restrict(self, region: Sequence[Tuple[int, int]]) -> Dict[Key, Scalar]:
        """Terms whose exponents lie inside the region (list of inclusive ranges)."""
        result = {}
        for key, coeff in self._terms.items():
            if all(low <= value <= high for value, (low, high) in zip(key[0], region)):
                result[key] = coeff
        return result

    def certified_equal(self, other: "SuperSeries") -> bool:
        return not compare_on_region(self, other, intersect_regions(self.safe_window, other.safe_window))

    def __eq__(self, other) -> bool:
        if isinstance(other, SuperSeries):
            return (
                self.spec.same_names(other.spec)
                and self.generator_count == other.generator_count
                and self._terms == other._terms
            )
        if isinstance(other, (Scalar, int, Fraction, GrassmannElement)):
            return self == SuperSeries.constant(self.spec, self.generator_count, other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # display ---------------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda item: (item[0][0], popcount(item[0][1]), item[0][1]))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for (exps, odd_mask), group in sorted(self.coefficients().items(), key=lambda kv: (kv[0][0], len(kv[0][1]), kv[0][1])):
            factors = list(odd_mask)
            for name, power in zip(self.spec.even_names, exps):
                if power == 1:
                    factors.append(name)
                elif power != 0:
                    factors.append(f"{name}^{power}")
            coeff_text = str(group)
            if not factors:
                pieces.append(f"({coeff_text})")
            elif group == ONE:
                pieces.append("*".join(factors))
            else:
                pieces.append(f"({coeff_text})*" + "*".join(factors))
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"SuperSeries({str(self)})"

    # fixtures ---------------------------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for (exps, names), coeff in sorted(self.coefficients().items(), key=lambda kv: (kv[0][0], kv[0][1])):
            terms.append({"exponents": list(exps), "odd_monomial": list(names), "coeff": str(coeff)})
        return {
            "spec": self.spec.to_json(),
            "generator_count": self.generator_count,
            "terms": terms,
            "safe": [list(bound) for bound in self._safe],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SuperSeries":
        spec = VariableSpec.from_json(data["spec"])
        generator_count = int(data.get("generator_count", 4))
        result = cls.zero(spec, generator_count)
        for term in data.get("terms", []):
            exps = dict(zip(spec.even_names, term["exponents"]))
            coeff = GrassmannElement.parse(str(term["coeff"]), generator_count)
            result = result + cls.monomial(spec, generator_count, exps, term.get("odd_monomial", ()), coeff)
        safe = data.get("safe")
        if safe is not None:
            result = result._new(result.raw_terms(), [tuple(bound) for bound in safe], clean=False)
        return result

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# ---------------------------------------------------------------------------
# Operations


def ss_mul(left: SuperSeries, right: SuperSeries) -> SuperSeries:
    """Cauchy product with Koszul signs and the window-arithmetic certificate."""
    left._check_compatible(right)
    spec = left._result_spec(right)
    windows = spec.windows
    terms: Dict[Key, Scalar] = {}
    clipped_low = [False] * len(windows)
    clipped_high = [False] * len(windows)
    right_items = list(right._terms.items())
    for (exps1, mask1), coeff1 in left._terms.items():
        for (exps2, mask2), coeff2 in right_items:
            if mask1 & mask2:
                continue
            exps = tuple(a + b for a, b in zip(exps1, exps2))
            outside = False
            for index, value in enumerate(exps):
                low, high = windows[index]
                if value < low:
                    clipped_low[index] = True
                    outside = True
                elif value > high:
                    clipped_high[index] = True
                    outside = True
            if outside:
                continue
            product = coeff1 * coeff2
            if merge_sign(mask1, mask2) < 0:
                product = -product
            key = (exps, mask1 | mask2)
            total = terms.get(key)
            total = product if total is None else total + product
            if total.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = total
    safe = _product_safe(left, right)
    for index, (low, high) in enumerate(windows):
        slo, shi = safe[index]
        if clipped_low[index]:
            slo = low if slo is None else max(slo, low)
        if clipped_high[index]:
            shi = high if shi is None else min(shi, high)
        safe[index] = (slo, shi)
    return SuperSeries(spec, left.generator_count, terms, safe, _clean=True)


def _product_safe(left: SuperSeries, right: SuperSeries) -> List[Tuple[Optional[int], Optional[int]]]:
    left_support = left._support_bounds()
    right_support = right._support_bounds()
    safe = []
    for (fl, fh), (gl, gh), (fsl, fsh), (gsl, gsh) in zip(left._safe, right._safe, left_support, right_support):
        lows = []
        highs = []
        if fl is not None:
            lows.append(fl + gsh)
        if gl is not None:
            lows.append(gl + fsh)
        if fh is not None:
            highs.append(fh + gsl)
        if gh is not None:
            highs.append(gh + fsl)
        low = max(lows) if lows else -INF
        high = min(highs) if highs else INF
        safe.append((_bound_to_int(low, lower=True), _bound_to_int(high, lower=False)))
    return safe


def _bound_to_int(value: float, lower: bool) -> Optional[int]:
    if value == -INF and lower:
        return None
    if value == INF and not lower:
        return None
    if value in (INF, -INF):
        # nothing certified in this direction: encode an empty interval edge
        return 10 ** 9 if lower else -(10 ** 9)
    return int(value)


def ss_derive(series: SuperSeries, name: str) -> SuperSeries:
    """Derivative in an even variable, or the left derivative in an odd one."""
    spec = series.spec
    if name in spec.odd_vars:
        bit = 1 << spec.odd_index(name)
        below = bit - 1
        terms = {}
        for (exps, mask), coeff in series._terms.items():
            if not mask & bit:
                continue
            sign = -1 if popcount(mask & below) & 1 else 1
            terms[(exps, mask ^ bit)] = coeff if sign > 0 else -coeff
        return series._new(terms, series._safe, clean=False)
    index = spec.even_index(name)
    terms = {}
    for (exps, mask), coeff in series._terms.items():
        power = exps[index]
        if power == 0:
            continue
        new_exps = exps[:index] + (power - 1,) + exps[index + 1:]
        terms[(new_exps, mask)] = coeff * power
    safe = list(series._safe)
    low, high = safe[index]
    safe[index] = (None if low is None else low - 1, None if high is None else high - 1)
    return series._new(terms, safe)


def is_nilpotent_shift(shift: SuperSeries) -> bool:
    """True when every term carries an odd formal variable or a soul generator."""
    return all(mask != 0 for _, mask in shift._terms)


def ss_taylor_shift(series: SuperSeries, name: str, shift: SuperSeries) -> SuperSeries:
    """Finite Taylor sum ``f + s f' + s^2 f''/2 + ...`` for a nilpotent even shift."""
    if shift.parity() != 0:
        raise SeriesError("Taylor shift must be even")
    if not is_nilpotent_shift(shift):
        raise SeriesError("non-nilpotent shift")
    result = series
    derivative = series
    power = SuperSeries.one(series.spec, series.generator_count)
    order = 0
    while True:
        order += 1
        power = power * shift
        if power.is_zero():
            break
        derivative = ss_derive(derivative, name)
        result = result + (power * derivative).scale(Fraction(1, _factorial(order)))
    return result


def _factorial(value: int) -> int:
    result = 1
    for k in range(2, value + 1):
        result *= k
    return result


def generalized_binomial(exponent: Union[int, Fraction], k: int) -> Fraction:
    """binom(exponent, k) for integer or rational exponent."""
    if isinstance(exponent, int) and exponent >= 0:
        return Fraction(comb(exponent, k)) if k <= exponent else Fraction(0)
    result = Fraction(1)
    for j in range(k):
        result = result * (exponent - j) / (j + 1)
    return result


def ss_binomial(
    first: SuperSeries, second: SuperSeries, exponent: int, max_terms: int = 200
) -> SuperSeries:
    """``(first + second)^exponent`` expanded in nonnegative powers of ``second``.

    ``first`` must be a single monomial in the even variables with an
    invertible even coefficient (Grassmann coefficients allowed).
    """
    first._check_compatible(second)
    if second.parity() not in (0,) or first.parity() not in (0,):
        raise SeriesError("binomial expansion needs even summands")
    exps_set = {exps for exps, _ in first._terms}
    if len(exps_set) != 1 or any(mask & ((1 << first.odd_count) - 1) for _, mask in first._terms):
        raise SeriesError("leading summand must be a single even monomial")
    (lead_exps,) = exps_set
    coeff = first._coefficient_by_mask(lead_exps, 0)
    if coeff.body().is_zero():
        raise SeriesError("leading coefficient has zero body")
    spec = first.spec
    one = SuperSeries.one(spec, first.generator_count)
    if exponent >= 0 and (second.is_exact() and first.is_exact()):
        result = one
        base = first + second
        for _ in range(exponent):
            result = result * base
        return result
    lead_power = _monomial_power(first, lead_exps, coeff, exponent)
    inverse_lead = _monomial_power(first, lead_exps, coeff, -1)
    ratio = inverse_lead * second
    result = lead_power
    power = one
    for k in range(1, max_terms + 1):
        binom = generalized_binomial(exponent, k)
        power = power * ratio
        if binom == 0:
            break
        if power.is_zero():
            # certificate of the vanishing tail is carried by power's safe window
            result = result + lead_power * power
            break
        result = result + (lead_power * power).scale(binom)
    else:
        raise SeriesError("binomial expansion did not terminate within the window")
    return result


def _monomial_power(template: SuperSeries, exps: Tuple[int, ...], coeff: GrassmannElement, exponent: int) -> SuperSeries:
    spec = template.spec
    scaled = coeff ** exponent if exponent >= 0 else coeff.inverse() ** (-exponent)
    new_exps = tuple(value * exponent for value in exps)
    shift = len(spec.odd_vars)
    terms = {(new_exps, mask << shift): c for mask, c in scaled.items()}
    return SuperSeries(spec, template.generator_count, terms)


def ss_substitute(
    series: SuperSeries,
    bindings: Mapping[str, SuperSeries],
    target_spec: Optional[VariableSpec] = None,
    leading: Optional[Mapping[str, Mapping[str, int]]] = None,
) -> SuperSeries:
    """Simultaneous substitution of variables by series in ``target_spec``.

    Unbound variables are kept and must exist in the target spec.  Negative
    powers of an even binding ``B`` are expanded as ``(lead + (B - lead))^n``
    in nonnegative powers of ``B - lead``, where ``lead`` is the binding's
    monomial at the exponents given in ``leading`` (default: the substituted
    variable itself, when it appears in the binding).
    """
    spec = series.spec
    target_spec = target_spec or spec
    generator_count = series.generator_count
    images: Dict[str, SuperSeries] = {}
    for name in spec.even_names + spec.odd_vars:
        if name in bindings:
            image = bindings[name]
            if not image.spec.same_names(target_spec) or image.generator_count != generator_count:
                raise SeriesError(f"binding for {name!r} is not in the target spec")
            if name in spec.odd_vars and image.parity() not in (1,) and not image.is_zero():
                raise SeriesError(f"odd binding for {name!r} must be odd")
            if name in spec.even_names and image.parity() not in (0,):
                raise SeriesError(f"even binding for {name!r} must be even")
            images[name] = image
        else:
            if not target_spec.has(name):
                raise SeriesError(f"variable {name!r} is unbound and absent from the target")
            images[name] = SuperSeries.var(target_spec, generator_count, name)

    for index, name in enumerate(spec.even_names):
        low, high = series._safe[index]
        if (low is not None or high is not None) and name in bindings:
            raise SeriesError(f"uncertified substitution: series is truncated in {name!r}")

    power_cache: Dict[Tuple[str, int], SuperSeries] = {}
    one = SuperSeries.one(target_spec, generator_count)

    def even_power(name: str, exponent: int) -> SuperSeries:
        key = (name, exponent)
        if key in power_cache:
            return power_cache[key]
        if exponent == 0:
            value = one
        elif exponent > 0:
            value = even_power(name, exponent - 1) * images[name]
        else:
            image = images[name]
            lead_exps_map = (leading or {}).get(name)
            if lead_exps_map is None:
                if name not in target_spec.even_names:
                    raise SeriesError(f"no leading term given for negative powers of {name!r}")
                lead_exps_map = {name: 1}
            lead_exps = tuple(lead_exps_map.get(var, 0) for var in target_spec.even_names)
            lead_coeff = image._coefficient_by_mask(lead_exps, 0)
            if lead_coeff.body().is_zero():
                raise SeriesError(f"substitution requires inverting a zero-body series for {name!r}")
            shift = len(target_spec.odd_vars)
            lead = SuperSeries(target_spec, generator_count, {(lead_exps, m << shift): c for m, c in lead_coeff.items()})
            value = ss_binomial(lead, image - lead, exponent)
        power_cache[key] = value
        return value

    shift = len(spec.odd_vars)
    low_mask = (1 << shift) - 1
    grouped: Dict[Tuple[Tuple[int, ...], int], Dict[int, Scalar]] = {}
    for (exps, mask), coeff in series._terms.items():
        grouped.setdefault((exps, mask & low_mask), {})[mask >> shift] = coeff

    odd_cache: Dict[int, SuperSeries] = {}

    def odd_product(odd_mask: int) -> SuperSeries:
        if odd_mask in odd_cache:
            return odd_cache[odd_mask]
        value = one
        for index in mask_to_subset(odd_mask):
            value = value * images[spec.odd_vars[index - 1]]
        odd_cache[odd_mask] = value
        return value

    result = SuperSeries.zero(target_spec, generator_count)
    target_shift = len(target_spec.odd_vars)
    for (exps, odd_mask), grassmann_terms in grouped.items():
        factor = odd_product(odd_mask)
        if factor.is_zero():
            continue
        coeff_series = SuperSeries(
            target_spec, generator_count, {(tuple(0 for _ in target_spec.even_vars), m << target_shift): c for m, c in grassmann_terms.items()}
        )
        term = factor * coeff_series
        for name, power in zip(spec.even_names, exps):
            if power:
                term = term * even_power(name, power)
        result = result + term
    return result


def ss_residue(series: SuperSeries, name: str) -> SuperSeries:
    """Coefficient series of ``name^-1`` in the remaining variables."""
    spec = series.spec
    index = spec.even_index(name)
    low, high = series.safe_window[index]
    if not low <= -1 <= high:
        raise SeriesError(f"exponent -1 of {name!r} is outside the certified window")
    new_spec = VariableSpec(
        tuple(entry for k, entry in enumerate(spec.even_vars) if k != index), spec.odd_vars
    )
    terms = {}
    for (exps, mask), coeff in series._terms.items():
        if exps[index] == -1:
            terms[(exps[:index] + exps[index + 1:], mask)] = coeff
    safe = tuple(bound for k, bound in enumerate(series._safe) if k != index)
    return SuperSeries(new_spec, series.generator_count, terms, safe, _clean=True)


def ss_coefficient_series(series: SuperSeries, name: str, exponent: int) -> SuperSeries:
    """Coefficient series of ``name^exponent``; generalizes the residue."""
    spec = series.spec
    index = spec.even_index(name)
    low, high = series.safe_window[index]
    if not low <= exponent <= high:
        raise SeriesError(f"exponent {exponent} of {name!r} is outside the certified window")
    new_spec = VariableSpec(
        tuple(entry for k, entry in enumerate(spec.even_vars) if k != index), spec.odd_vars
    )
    terms = {}
    for (exps, mask), coeff in series._terms.items():
        if exps[index] == exponent:
            terms[(exps[:index] + exps[index + 1:], mask)] = coeff
    safe = tuple(bound for k, bound in enumerate(series._safe) if k != index)
    return SuperSeries(new_spec, series.generator_count, terms, safe, _clean=True)


def intersect_regions(*regions: Sequence[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    result = None
    for region in regions:
        if result is None:
            result = [tuple(bound) for bound in region]
        else:
            result = [(max(a[0], b[0]), min(a[1], b[1])) for a, b in zip(result, region)]
    return tuple(result or ())


def shrink_region(region: Sequence[Tuple[int, int]], amount: int) -> Tuple[Tuple[int, int], ...]:
    return tuple((low + amount, high - amount) for low, high in region)


def compare_on_region(
    left: SuperSeries, right: SuperSeries, region: Sequence[Tuple[int, int]]
) -> List[dict]:
    """Mismatched coefficients (exponents, odd monomial, lhs, rhs) inside ``region``."""
    left._check_compatible(right)
    lhs = left.restrict(region)
    rhs = right.restrict(region)
    shift = left.odd_count
    low_mask = (1 << shift) - 1
    keys = set()
    for exps, mask in list(lhs) + list(rhs):
        keys.add((exps, mask & low_mask))
    mismatches = []
    for exps, odd_mask in sorted(keys):
        a = left._coefficient_by_mask(exps, odd_mask)
        b = right._coefficient_by_mask(exps, odd_mask)
        if a != b:
            names = [left.spec.odd_vars[index - 1] for index in mask_to_subset(odd_mask)]
            mismatches.append({"exponents": list(exps), "odd_monomial": names, "lhs": str(a), "rhs": str(b)})
    return mismatches
