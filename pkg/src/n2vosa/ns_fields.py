"""Formal fields ``Y(v, (x, odd...))`` with Neveu-Schwarz coefficients.

A field is a finite window of a formal series whose coefficients are
:class:`NsElement` values (plus, for the vacuum, multiples of the identity
operator).  Odd formal variables always stand to the left of the
coefficient.  The vectors ``v`` come from a small dictionary generated by
the N=2 superconformal element: ``1``, ``mu = J(-1)1``, ``tau = G(-3/2)1``,
``omega = L(-2)1`` and their ``L(-1)`` images.  Vectors are kept in a
normal-ordered vacuum-module form computed purely from ``ns_bracket`` and the
vacuum annihilation rules, so every closure entry (for example the
``G(-1/2)`` images) is derived at run time.

Every check compares two fields coefficient by coefficient on the region
where both are exact, and returns a :class:`DeltaReport`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .delta import DeltaReport
from .grassmann import I, ONE, ZERO, Scalar, merge_sign, popcount
from .linalg import solve_linear
from .ns_algebra import (
    HOMOGENEOUS,
    NONHOMOGENEOUS,
    NsBasisElement,
    NsElement,
    basis_bracket,
    basis_convert,
    ns_bracket,
    _convert_basis_element,
)

DEFAULT_GENERATORS = 4
DEFAULT_WINDOW = 12
MIN_OPE_WINDOW = 8
MIN_SUITE_WINDOW = 10  # weak supercommutativity at k=4 needs k + 6
HALF = Scalar(Fraction(1, 2))
INV_R2 = Scalar(0, Fraction(1, 2))

Exps = Tuple[int, ...]
Key = Tuple[Exps, int]
Monomial = Tuple[NsBasisElement, ...]
Vector = Dict[Monomial, Scalar]


class FieldError(ValueError):
    """Raised for unknown labels, missing dictionary entries and bad variable sets."""


# ---------------------------------------------------------------------------
# Variable sets

_ODD_NAMES = {
    "homogeneous": ("phi+", "phi-"),
    "nonhomogeneous": ("phi1", "phi2"),
    "one_variable": ("phi",),
    "modes": (),
}
_NATIVE_BASIS = {"homogeneous": HOMOGENEOUS, "nonhomogeneous": NONHOMOGENEOUS, "one_variable": NONHOMOGENEOUS}
VARIABLE_SET_NAMES = tuple(_ODD_NAMES)


@dataclass(frozen=True)
class VariableSet:
    """Formal variables of a field: ``points`` copies of ``(x, odd...)``."""

    name: str
    basis_tag: str
    points: int = 1

    def __post_init__(self):
        if self.name not in _ODD_NAMES:
            raise FieldError(f"unknown variable set {self.name!r}")
        native = _NATIVE_BASIS.get(self.name)
        if native is not None and native != self.basis_tag:
            raise FieldError(f"variable set {self.name} uses the {native} basis")

    @property
    def odd_per_point(self) -> int:
        return len(_ODD_NAMES[self.name])

    @property
    def even_names(self) -> Tuple[str, ...]:
        if self.points == 1:
            return ("x",)
        return tuple(f"x{p + 1}" for p in range(self.points))

    @property
    def odd_names(self) -> Tuple[str, ...]:
        base = _ODD_NAMES[self.name]
        if self.points == 1:
            return base
        names = []
        for p in range(self.points):
            names.extend(name.replace("phi", f"phi{p + 1}_") for name in base)
        return tuple(names)

    def with_points(self, points: int) -> "VariableSet":
        return VariableSet(self.name, self.basis_tag, points)


def variable_set(name: str, basis_tag: Optional[str] = None) -> VariableSet:
    """One-point variable set by name; ``modes`` (no odd variables) takes an explicit basis."""
    if name not in _ODD_NAMES:
        raise FieldError(f"unknown variable set {name!r}; expected one of {VARIABLE_SET_NAMES}")
    return VariableSet(name, basis_tag or _NATIVE_BASIS.get(name, HOMOGENEOUS))


HOMO = variable_set("homogeneous")
NONHOMO = variable_set("nonhomogeneous")
ONE_VARIABLE = variable_set("one_variable")


# ---------------------------------------------------------------------------
# Vacuum-module normal ordering

_KIND_RANK = {"d": 0, "L": 1, "J": 2, "Gplus": 3, "G1": 3, "Gminus": 4, "G2": 4}


def _order_key(element: NsBasisElement) -> Tuple[int, int]:
    return (_KIND_RANK[element.kind], element.index)


def kills_vacuum(element: NsBasisElement) -> bool:
    """``L(n)1 = 0`` for ``n >= -1``, ``J(n)1 = 0`` for ``n >= 0``, ``G(r)1 = 0`` for ``r >= -1/2``."""
    if element.kind == "d":
        return False
    if element.kind == "L":
        return element.index >= -1
    return element.index >= 0


def _add_into(target: Vector, key: Monomial, value: Scalar) -> None:
    if value.is_zero():
        return
    total = target.get(key, ZERO) + value
    if total.is_zero():
        target.pop(key, None)
    else:
        target[key] = total


@lru_cache(maxsize=None)
def _apply_basis(element: NsBasisElement, monomial: Monomial) -> Tuple[Tuple[Monomial, Scalar], ...]:
    result: Vector = {}
    if not monomial:
        if not kills_vacuum(element):
            result[(element,)] = ONE
        return tuple(result.items())
    first, rest = monomial[0], monomial[1:]
    creation = not kills_vacuum(element)
    if creation and _order_key(element) < _order_key(first):
        return (((element,) + monomial, ONE),)
    if element == first and creation:
        if element.parity == 0:
            return (((element,) + monomial, ONE),)
        # X X = [X, X] / 2 for odd X
        for key, value in basis_bracket(element, element).items():
            for mono, coeff in _apply_basis(key, rest):
                _add_into(result, mono, coeff * value * HALF)
        return tuple(result.items())
    # X Y rest = (-1)^{|X||Y|} Y (X rest) + [X, Y] rest
    sign = -1 if element.parity and first.parity else 1
    for mono, coeff in _apply_basis(element, rest):
        for mono2, coeff2 in _apply_basis(first, mono):
            _add_into(result, mono2, coeff * coeff2 * sign)
    for key, value in basis_bracket(element, first).items():
        for mono, coeff in _apply_basis(key, rest):
            _add_into(result, mono, coeff * value)
    return tuple(result.items())


def apply_mode(element: NsBasisElement, vector: Vector) -> Vector:
    """Action of one basis element on a normal-ordered vector."""
    result: Vector = {}
    for monomial, coeff in vector.items():
        for mono, value in _apply_basis(element, monomial):
            _add_into(result, mono, coeff * value)
    return result


def apply_element(element: NsElement, vector: Vector) -> Vector:
    """Action of an algebra element with scalar coefficients."""
    result: Vector = {}
    for key, coeff in element.items():
        if not coeff.is_scalar():
            raise FieldError("vectors carry scalar coefficients only")
        scalar = coeff.body()
        for mono, value in apply_mode(key, vector).items():
            _add_into(result, mono, value * scalar)
    return result


def vector_from_modes(modes: Sequence[NsBasisElement], coeff: Scalar = ONE) -> Vector:
    """``coeff * modes[0] modes[1] ... 1`` in normal order."""
    vector: Vector = {(): ONE}
    for mode in reversed(modes):
        vector = apply_mode(mode, vector)
    return {mono: value * coeff for mono, value in vector.items()}


def add_vectors(*terms: Tuple[Scalar, Vector]) -> Vector:
    result: Vector = {}
    for factor, vector in terms:
        for mono, value in vector.items():
            _add_into(result, mono, value * Scalar.coerce(factor))
    return result


def convert_vector(vector: Vector, target: str) -> Vector:
    """Rewrite a vector in the other basis (G-modes converted, then re-normal-ordered)."""
    result: Vector = {}
    for monomial, coeff in vector.items():
        partial: Vector = {(): coeff}
        for mode in reversed(monomial):
            images = _convert_basis_element(mode, target)
            step: Vector = {}
            for image, factor in images.items():
                for mono, value in apply_mode(image, partial).items():
                    _add_into(step, mono, value * factor)
            partial = step
        for mono, value in partial.items():
            _add_into(result, mono, value)
    return result


def _monomial_weight(monomial: Monomial) -> Fraction:
    return -sum((mode.mode for mode in monomial if mode.kind != "d"), Fraction(0))


def _monomial_charge(monomial: Monomial) -> int:
    return sum(1 if mode.kind == "Gplus" else -1 if mode.kind == "Gminus" else 0 for mode in monomial)


def vector_weight(vector: Vector) -> Optional[Fraction]:
    weights = {_monomial_weight(mono) for mono in vector}
    return weights.pop() if len(weights) == 1 else (Fraction(0) if not weights else None)


def vector_charge(vector: Vector, basis_tag: str) -> Optional[int]:
    """``J(0)`` eigenvalue, or ``None`` when the vector is not an eigenvector."""
    homogeneous = vector if basis_tag == HOMOGENEOUS else convert_vector(vector, HOMOGENEOUS)
    charges = {_monomial_charge(mono) for mono in homogeneous}
    return charges.pop() if len(charges) == 1 else (0 if not charges else None)


def vector_parity(vector: Vector) -> int:
    parities = {sum(mode.parity for mode in mono) % 2 for mono in vector}
    return parities.pop() if len(parities) == 1 else 0


def vector_text(vector: Vector) -> str:
    if not vector:
        return "0"
    pieces = []
    for mono, coeff in sorted(vector.items(), key=lambda item: [str(m) for m in item[0]]):
        word = " ".join(str(mode) for mode in mono) + " 1" if mono else "1"
        pieces.append(f"({coeff})*{word}")
    return " + ".join(pieces)


# ---------------------------------------------------------------------------
# Labels and printed expansions

def _mode(kind: str, index: int, basis_tag: str) -> NsBasisElement:
    return NsBasisElement(kind, index, basis_tag)


@dataclass(frozen=True)
class FieldLabel:
    """A dictionary vector: its name, weights, parity and normal-ordered form."""

    name: str
    basis_tag: str
    weight: Fraction
    j_weight: Optional[int]
    parity: int
    vector: Tuple[Tuple[Monomial, Scalar], ...]

    def as_vector(self) -> Vector:
        return dict(self.vector)


_BASE_VECTORS = {
    HOMOGENEOUS: {
        "vac": (),
        "mu": (("J", -1),),
        "tau_plus": (("Gplus", -1),),
        "tau_minus": (("Gminus", -1),),
        "omega": (("L", -2),),
    },
    NONHOMOGENEOUS: {
        "vac": (),
        "mu": (("J", -1),),
        "tau1": (("G1", -1),),
        "tau2": (("G2", -1),),
        "omega": (("L", -2),),
    },
}
DERIVED_DEPTH = 2
_DERIVED_PREFIX = "Lm1_"


def _split_label(name: str) -> Tuple[int, str]:
    depth = 0
    while name.startswith(_DERIVED_PREFIX):
        depth += 1
        name = name[len(_DERIVED_PREFIX):]
    return depth, name


def _native_basis(base: str) -> str:
    if base in _BASE_VECTORS[HOMOGENEOUS]:
        return HOMOGENEOUS
    if base in _BASE_VECTORS[NONHOMOGENEOUS]:
        return NONHOMOGENEOUS
    raise FieldError(f"unknown field label {base!r}")


@lru_cache(maxsize=None)
def field_label(name: str, basis_tag: Optional[str] = None) -> FieldLabel:
    """Label by name (``mu``, ``tau_plus``, ``Lm1_omega``...), with its vector in ``basis_tag``."""
    depth, base = _split_label(name)
    native = _native_basis(base)
    if base in ("vac", "mu", "omega") and basis_tag is not None:
        native = basis_tag
    modes = [_mode(kind, index, native) for kind, index in _BASE_VECTORS[native][base]]
    vector = vector_from_modes(modes)
    for _ in range(depth):
        vector = apply_mode(_mode("L", -1, native), vector)
    if basis_tag is not None and basis_tag != native:
        vector = convert_vector(vector, basis_tag)
        native = basis_tag
    weight = vector_weight(vector)
    if weight is None:
        raise FieldError(f"label {name!r} has no definite weight")
    return FieldLabel(name, native, weight, vector_charge(vector, native), vector_parity(vector), tuple(sorted(vector.items(), key=lambda item: [str(m) for m in item[0]])))


def label_names(basis_tag: str, depth: int = DERIVED_DEPTH) -> List[str]:
    names = []
    for base in _BASE_VECTORS[basis_tag]:
        names.append(base)
        if base == "vac":
            continue
        for level in range(1, depth + 1):
            names.append(_DERIVED_PREFIX * level + base)
    return names


# Each printed expansion maps an x-exponent k to {odd mask: [(mode, scalar)]}.
Expansion = Callable[[int], Dict[int, List[Tuple[NsBasisElement, Scalar]]]]


def _homo_mu(k: int):
    n, m = -k - 1, -k - 2
    h = HOMOGENEOUS
    return {
        0: [(_mode("J", n, h), ONE)],
        1: [(_mode("Gplus", m + 1, h), -ONE)],
        2: [(_mode("Gminus", m + 1, h), ONE)],
        3: [(_mode("L", m, h), Scalar(-2))],
    }


def _homo_tau(sign: int) -> Expansion:
    kind = "Gplus" if sign > 0 else "Gminus"
    other_bit = 2 if sign > 0 else 1  # phi^-/+ opposite to the charge

    def expansion(k: int):
        n, m = -k - 2, -k - 3
        h = HOMOGENEOUS
        return {
            0: [(_mode(kind, n + 1, h), ONE)],
            other_bit: [(_mode("L", n, h), Scalar(2)), (_mode("J", n, h), Scalar(sign * (n + 1)))],
            3: [(_mode(kind, m + 1, h), Scalar(sign * (m + 2)))],
        }

    return expansion


def _homo_omega(k: int):
    n, m = -k - 2, -k - 3
    h = HOMOGENEOUS
    return {
        0: [(_mode("L", n, h), ONE)],
        1: [(_mode("Gplus", m + 1, h), Scalar(Fraction(-(m + 2), 2)))],
        2: [(_mode("Gminus", m + 1, h), Scalar(Fraction(-(m + 2), 2)))],
        3: [(_mode("J", m, h), Scalar(Fraction(-(m + 1) * (m + 2), 2)))],
    }


def _nonhomo_mu(k: int):
    n, m = -k - 1, -k - 2
    h = NONHOMOGENEOUS
    return {
        0: [(_mode("J", n, h), ONE)],
        1: [(_mode("G2", m + 1, h), I)],
        2: [(_mode("G1", m + 1, h), -I)],
        3: [(_mode("L", m, h), I * 2)],
    }


def _nonhomo_tau1(k: int):
    n, m = -k - 2, -k - 3
    h = NONHOMOGENEOUS
    return {
        0: [(_mode("G1", n + 1, h), ONE)],
        1: [(_mode("L", n, h), Scalar(2))],
        2: [(_mode("J", n, h), -I * (n + 1))],
        3: [(_mode("G2", m + 1, h), Scalar(-(m + 2)))],
    }


def _nonhomo_tau2(k: int):
    n, m = -k - 2, -k - 3
    h = NONHOMOGENEOUS
    return {
        0: [(_mode("G2", n + 1, h), ONE)],
        2: [(_mode("L", n, h), Scalar(2))],
        1: [(_mode("J", n, h), I * (n + 1))],
        3: [(_mode("G1", m + 1, h), Scalar(m + 2))],
    }


def _nonhomo_omega(k: int):
    n, m = -k - 2, -k - 3
    h = NONHOMOGENEOUS
    return {
        0: [(_mode("L", n, h), ONE)],
        1: [(_mode("G1", m + 1, h), Scalar(Fraction(-(m + 2), 2)))],
        2: [(_mode("G2", m + 1, h), Scalar(Fraction(-(m + 2), 2)))],
        3: [(_mode("J", m, h), I * Scalar(Fraction((m + 1) * (m + 2), 2)))],
    }


PRINTED_EXPANSIONS: Dict[Tuple[str, str], Expansion] = {
    (HOMOGENEOUS, "mu"): _homo_mu,
    (HOMOGENEOUS, "tau_plus"): _homo_tau(1),
    (HOMOGENEOUS, "tau_minus"): _homo_tau(-1),
    (HOMOGENEOUS, "omega"): _homo_omega,
    (NONHOMOGENEOUS, "mu"): _nonhomo_mu,
    (NONHOMOGENEOUS, "tau1"): _nonhomo_tau1,
    (NONHOMOGENEOUS, "tau2"): _nonhomo_tau2,
    (NONHOMOGENEOUS, "omega"): _nonhomo_omega,
}


# ---------------------------------------------------------------------------
# Fields

Region = Tuple[Tuple[int, int], ...]


def _falling(value: int, order: int) -> int:
    result = 1
    for j in range(order):
        result *= value - j
    return result


class NsField:
    """Windowed series ``sum odd^S x^k A`` with :class:`NsElement` coefficients ``A``.

    ``terms`` maps ``(exponents, odd mask)`` to the coefficient and
    ``identity`` maps the same keys to multiples of the identity operator.
    Every coefficient with exponents inside ``region`` is exact.
    """

    def __init__(
        self,
        variables: VariableSet,
        region: Region,
        terms: Optional[Dict[Key, NsElement]] = None,
        identity: Optional[Dict[Key, Scalar]] = None,
        label: Optional[FieldLabel] = None,
        generator_count: int = DEFAULT_GENERATORS,
    ):
        if len(region) != variables.points:
            raise FieldError("region must have one bound per point")
        self.variables = variables
        self.region: Region = tuple((int(lo), int(hi)) for lo, hi in region)
        self.generator_count = generator_count
        self.label = label
        self.terms: Dict[Key, NsElement] = {}
        self.identity: Dict[Key, Scalar] = {}
        for key, value in (terms or {}).items():
            if value.basis_tag != variables.basis_tag:
                raise FieldError("coefficient basis does not match the variable set")
            if not value.is_zero() and self.contains(key[0]):
                self.terms[key] = value
        for key, value in (identity or {}).items():
            if not value.is_zero() and self.contains(key[0]):
                self.identity[key] = value

    # basic access -------------------------------------------------------------

    @property
    def basis_tag(self) -> str:
        return self.variables.basis_tag

    def contains(self, exps: Exps) -> bool:
        return all(lo <= e <= hi for e, (lo, hi) in zip(exps, self.region))

    def zero_element(self) -> NsElement:
        return NsElement.zero(self.basis_tag, self.generator_count)

    def coefficient(self, exps: Exps, mask: int = 0) -> NsElement:
        return self.terms.get((tuple(exps), mask), self.zero_element())

    def identity_coefficient(self, exps: Exps, mask: int = 0) -> Scalar:
        return self.identity.get((tuple(exps), mask), ZERO)

    def is_zero(self) -> bool:
        return not self.terms and not self.identity

    def _new(self, terms, identity, region=None, variables=None) -> "NsField":
        return NsField(variables or self.variables, region or self.region, terms, identity, None, self.generator_count)

    # linear structure ---------------------------------------------------------

    def _combine(self, other: "NsField", factor: Scalar) -> "NsField":
        if other.variables != self.variables:
            raise FieldError("fields live on different variable sets")
        region = _intersect(self.region, other.region)
        terms = dict(self.terms)
        for key, value in other.terms.items():
            value = value.scale(factor)
            terms[key] = terms[key] + value if key in terms else value
        identity = dict(self.identity)
        for key, value in other.identity.items():
            identity[key] = identity.get(key, ZERO) + value * factor
        return self._new(terms, identity, region)

    def __add__(self, other: "NsField") -> "NsField":
        return self._combine(other, ONE)

    def __sub__(self, other: "NsField") -> "NsField":
        return self._combine(other, -ONE)

    def scale(self, factor) -> "NsField":
        factor = Scalar.coerce(factor)
        return self._new(
            {key: value.scale(factor) for key, value in self.terms.items()},
            {key: value * factor for key, value in self.identity.items()},
        )

    def map_coefficients(self, function: Callable[[NsElement], NsElement], basis_tag: Optional[str] = None) -> "NsField":
        variables = self.variables if basis_tag is None else VariableSet(self.variables.name, basis_tag, self.variables.points) if self.variables.name == "modes" else self.variables
        return NsField(variables, self.region, {key: function(value) for key, value in self.terms.items()}, dict(self.identity), None, self.generator_count)

    # calculus -----------------------------------------------------------------

    def derivative_x(self, point: int = 0) -> "NsField":
        """``d/dx`` at one point; the exact region loses its top exponent."""
        terms: Dict[Key, NsElement] = {}
        for (exps, mask), value in self.terms.items():
            if exps[point] == 0:
                continue
            new = exps[:point] + (exps[point] - 1,) + exps[point + 1:]
            terms[(new, mask)] = value.scale(Scalar(exps[point]))
        region = list(self.region)
        lo, hi = region[point]
        region[point] = (lo - 1, hi - 1)
        return self._new(terms, {}, tuple(region))

    def derivative_odd(self, bit: int) -> "NsField":
        """Left derivative in the odd variable with this bit index."""
        flag = 1 << bit
        below = flag - 1
        terms: Dict[Key, NsElement] = {}
        for (exps, mask), value in self.terms.items():
            if mask & flag:
                sign = -1 if popcount(mask & below) % 2 else 1
                terms[(exps, mask ^ flag)] = value.scale(Scalar(sign))
        identity: Dict[Key, Scalar] = {}
        for (exps, mask), value in self.identity.items():
            if mask & flag:
                sign = -1 if popcount(mask & below) % 2 else 1
                identity[(exps, mask ^ flag)] = value * sign
        return self._new(terms, identity)

    def multiply_odd(self, mask: int, factor=ONE) -> "NsField":
        """Left multiplication by ``factor * odd^mask``."""
        factor = Scalar.coerce(factor)
        terms: Dict[Key, NsElement] = {}
        for (exps, own), value in self.terms.items():
            if own & mask:
                continue
            terms[(exps, own | mask)] = value.scale(factor * merge_sign(mask, own))
        identity: Dict[Key, Scalar] = {}
        for (exps, own), value in self.identity.items():
            if own & mask:
                continue
            identity[(exps, own | mask)] = value * factor * merge_sign(mask, own)
        return self._new(terms, identity)

    def multiply_x(self, power: int, point: int = 0) -> "NsField":
        """Multiplication by ``x^power`` at one point; the region shifts with it."""
        def shift(exps: Exps) -> Exps:
            return exps[:point] + (exps[point] + power,) + exps[point + 1:]

        region = list(self.region)
        lo, hi = region[point]
        region[point] = (lo + power, hi + power)
        return self._new(
            {(shift(e), m): v for (e, m), v in self.terms.items()},
            {(shift(e), m): v for (e, m), v in self.identity.items()},
            tuple(region),
        )

    def restrict_odd(self, keep_bits: Sequence[int], variables: VariableSet) -> "NsField":
        """Set every odd variable not in ``keep_bits`` to zero and renumber the rest."""
        def remap(mask: int) -> Optional[int]:
            result = 0
            for new_bit, old_bit in enumerate(keep_bits):
                if mask & (1 << old_bit):
                    result |= 1 << new_bit
            kept = sum(1 << bit for bit in keep_bits)
            return result if mask & ~kept == 0 else None

        terms = {}
        for (exps, mask), value in self.terms.items():
            new = remap(mask)
            if new is not None:
                terms[(exps, new)] = value
        identity = {}
        for (exps, mask), value in self.identity.items():
            new = remap(mask)
            if new is not None:
                identity[(exps, new)] = value
        return NsField(variables, self.region, terms, identity, None, self.generator_count)

    # comparison ---------------------------------------------------------------

    def difference_on(self, other: "NsField", region: Optional[Region] = None, limit: int = 20) -> List[dict]:
        if other.variables.points != self.variables.points or other.basis_tag != self.basis_tag:
            raise FieldError("fields are not comparable")
        region = region or _intersect(self.region, other.region)
        mismatches = []
        inside = lambda exps: all(lo <= e <= hi for e, (lo, hi) in zip(exps, region))
        keys = sorted(set(self.terms) | set(other.terms) | set(self.identity) | set(other.identity))
        for key in keys:
            if not inside(key[0]):
                continue
            left, right = self.coefficient(*key), other.coefficient(*key)
            left_id, right_id = self.identity_coefficient(*key), other.identity_coefficient(*key)
            if left != right or left_id != right_id:
                mismatches.append({
                    "exponents": list(key[0]),
                    "odd_monomial": self.odd_names_of(key[1]),
                    "lhs": _coefficient_text(left, left_id),
                    "rhs": _coefficient_text(right, right_id),
                })
                if len(mismatches) >= limit:
                    break
        return mismatches

    def odd_names_of(self, mask: int) -> List[str]:
        names = self.variables.odd_names
        return [names[bit] for bit in range(len(names)) if mask & (1 << bit)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, NsField):
            return NotImplemented
        return self.variables == other.variables and not self.difference_on(other, limit=1)

    __hash__ = None

    # serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        keys = sorted(set(self.terms) | set(self.identity))
        for key in keys:
            terms.append({
                "exponents": list(key[0]),
                "odd_monomial": self.odd_names_of(key[1]),
                "coeff": _coefficient_text(self.coefficient(*key), self.identity_coefficient(*key)),
            })
        return {
            "label": self.label.name if self.label else None,
            "variable_set": self.variables.name,
            "basis_tag": self.basis_tag,
            "spec": {
                "even_vars": [[name, list(bound)] for name, bound in zip(self.variables.even_names, self.region)],
                "odd_vars": list(self.variables.odd_names),
            },
            "generator_count": self.generator_count,
            "terms": terms,
            "safe": [list(bound) for bound in self.region],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:
        name = self.label.name if self.label else "field"
        return f"NsField({name}, {self.variables.name}, region={self.region}, terms={len(self.terms) + len(self.identity)})"


def _coefficient_text(element: NsElement, identity: Scalar) -> str:
    pieces = []
    if not identity.is_zero():
        pieces.append(f"({identity})*id")
    if not element.is_zero():
        pieces.append(str(element))
    return " + ".join(pieces) if pieces else "0"


def _intersect(left: Region, right: Region) -> Region:
    return tuple((max(a[0], b[0]), min(a[1], b[1])) for a, b in zip(left, right))


def _window_region(window: int, points: int = 1) -> Region:
    return tuple((-window, window) for _ in range(points))


# ---------------------------------------------------------------------------
# Building fields from labels and vectors

def _materialize(expansion: Expansion, basis_tag: str, window: int, depth: int, generator_count: int) -> Dict[Key, NsElement]:
    """Printed expansion differentiated ``depth`` times, on exponents ``-window..window``."""
    terms: Dict[Key, NsElement] = {}
    for k in range(-window, window + 1):
        source = k + depth
        factor = _falling(source, depth)
        if factor == 0:
            continue
        for mask, pieces in expansion(source).items():
            element = NsElement(basis_tag, generator_count, {mode: value * factor for mode, value in pieces})
            if not element.is_zero():
                terms[((k,), mask)] = element
    return terms


def build_field(label, variables: VariableSet = HOMO, window: int = DEFAULT_WINDOW, generator_count: int = DEFAULT_GENERATORS) -> NsField:
    """``Y(v)`` for a dictionary label on exponents ``-window..window``.

    Printed expansions are used in their own flavor; the other flavor is
    reached through the variable substitution, ``L(-1)`` images through
    ``d/dx``, the one-variable set by restricting ``phi2 = 0`` and the
    ``modes`` set by restricting every odd variable to zero.
    """
    name = label.name if isinstance(label, FieldLabel) else str(label)
    depth, base = _split_label(name)
    if base not in _BASE_VECTORS[HOMOGENEOUS] and base not in _BASE_VECTORS[NONHOMOGENEOUS]:
        raise FieldError(f"unknown field label {name!r}")
    if window < 0:
        raise FieldError("window must be nonnegative")
    if variables.points != 1:
        raise FieldError("build_field makes one-point fields")
    if variables.name == "one_variable":
        full = build_field(name, NONHOMO, window, generator_count)
        result = full.restrict_odd([0], variables)
    elif variables.name == "modes":
        full = build_field(name, variable_set(_full_set(variables.basis_tag)), window, generator_count)
        result = full.restrict_odd([], variables)
    else:
        tag = variables.basis_tag
        if base == "vac":
            identity = {((0,), 0): ONE} if depth == 0 else {}
            result = NsField(variables, _window_region(window), {}, identity, None, generator_count)
        elif (tag, base) in PRINTED_EXPANSIONS:
            terms = _materialize(PRINTED_EXPANSIONS[(tag, base)], tag, window, depth, generator_count)
            result = NsField(variables, _window_region(window), terms, {}, None, generator_count)
        elif tag == NONHOMOGENEOUS:
            result = to_nonhomogeneous(build_field(name, HOMO, window, generator_count))
        else:
            result = to_homogeneous(build_field(name, NONHOMO, window, generator_count))
    result.label = field_label(name, variables.basis_tag)
    return result


def _full_set(basis_tag: str) -> str:
    return "homogeneous" if basis_tag == HOMOGENEOUS else "nonhomogeneous"


@lru_cache(maxsize=None)
def _dictionary(basis_tag: str) -> Tuple[Tuple[str, Tuple[Tuple[Monomial, Scalar], ...]], ...]:
    return tuple((name, field_label(name, basis_tag).vector) for name in label_names(basis_tag))


def decompose_vector(vector: Vector, basis_tag: str) -> Dict[str, Scalar]:
    """Write a vector as a combination of dictionary labels; raises when it is outside the span."""
    if not vector:
        return {}
    entries = [(name, dict(items)) for name, items in _dictionary(basis_tag)]
    monomials = sorted({mono for _, vec in entries for mono in vec} | set(vector), key=lambda m: [str(x) for x in m])
    if any(mono not in {m for _, vec in entries for m in vec} for mono in vector):
        raise FieldError(f"vector {vector_text(vector)} is not in the field dictionary")
    matrix = [[vec.get(mono, ZERO) for _, vec in entries] for mono in monomials]
    rhs = [vector.get(mono, ZERO) for mono in monomials]
    solution = solve_linear(matrix, rhs, ZERO)
    if solution is None:
        raise FieldError(f"vector {vector_text(vector)} is not in the field dictionary")
    return {name: value for (name, _), value in zip(entries, solution) if not value.is_zero()}


def field_of_vector(vector: Vector, variables: VariableSet = HOMO, window: int = DEFAULT_WINDOW, generator_count: int = DEFAULT_GENERATORS) -> NsField:
    """``Y(v)`` for any vector in the span of the dictionary (vectors in the variable set's basis)."""
    result = NsField(variables, _window_region(window), {}, {}, None, generator_count)
    for name, coeff in decompose_vector(vector, variables.basis_tag).items():
        result = result + build_field(name, variables, window, generator_count).scale(coeff)
    return result


def dictionary_closure(basis_tag: str = HOMOGENEOUS) -> Dict[str, str]:
    """``G(-1/2)`` and ``L(-1)`` images of the base labels, derived from the bracket and the vacuum rules."""
    odd = ("Gplus", "Gminus") if basis_tag == HOMOGENEOUS else ("G1", "G2")
    result = {}
    for base in _BASE_VECTORS[basis_tag]:
        vector = field_label(base, basis_tag).as_vector()
        for kind in odd + ("L",):
            mode = _mode(kind, 0 if kind != "L" else -1, basis_tag)
            image = apply_mode(mode, vector)
            try:
                combination = decompose_vector(image, basis_tag)
                text = " + ".join(f"({value})*{name}" for name, value in sorted(combination.items())) or "0"
            except FieldError:
                text = "outside dictionary: " + vector_text(image)
            result[f"{mode} {base}"] = text
    return result


# ---------------------------------------------------------------------------
# Odd variable substitutions and flavor change

OddImage = Dict[int, Scalar]  # new bit -> scalar


def substitute_odd(field: NsField, images: Sequence[OddImage], variables: VariableSet, coefficient_map: Callable[[NsElement], NsElement]) -> NsField:
    """Replace each odd variable by a linear combination of new odd variables and map coefficients."""
    expanded: Dict[int, Dict[int, Scalar]] = {}

    def expand(mask: int) -> Dict[int, Scalar]:
        if mask in expanded:
            return expanded[mask]
        product: Dict[int, Scalar] = {0: ONE}
        for bit in range(len(images)):
            if not mask & (1 << bit):
                continue
            step: Dict[int, Scalar] = {}
            for left, lvalue in product.items():
                for new_bit, rvalue in images[bit].items():
                    flag = 1 << new_bit
                    if left & flag:
                        continue
                    value = lvalue * rvalue * merge_sign(left, flag)
                    step[left | flag] = step.get(left | flag, ZERO) + value
            product = {key: value for key, value in step.items() if not value.is_zero()}
        expanded[mask] = product
        return product

    terms: Dict[Key, NsElement] = {}
    for (exps, mask), value in field.terms.items():
        mapped = coefficient_map(value)
        for new_mask, factor in expand(mask).items():
            term = mapped.scale(factor)
            key = (exps, new_mask)
            terms[key] = terms[key] + term if key in terms else term
    identity: Dict[Key, Scalar] = {}
    for (exps, mask), value in field.identity.items():
        for new_mask, factor in expand(mask).items():
            key = (exps, new_mask)
            identity[key] = identity.get(key, ZERO) + value * factor
    return NsField(variables, field.region, terms, identity, None, field.generator_count)


def _per_point(images: Sequence[OddImage], points: int) -> List[OddImage]:
    width = len(images)
    result = []
    for p in range(points):
        for image in images:
            result.append({bit + p * width: value for bit, value in image.items()})
    return result


# phi+ = (phi1 + i phi2)/sqrt2, phi- = (phi1 - i phi2)/sqrt2
_HOMO_TO_NONHOMO = ({0: INV_R2, 1: I * INV_R2}, {0: INV_R2, 1: -I * INV_R2})
# phi1 = (phi+ + phi-)/sqrt2, phi2 = -i (phi+ - phi-)/sqrt2
_NONHOMO_TO_HOMO = ({0: INV_R2, 1: INV_R2}, {0: -I * INV_R2, 1: I * INV_R2})


def to_nonhomogeneous(field: NsField) -> NsField:
    """Substitute ``phi+-`` by ``(phi1 +- i phi2)/sqrt2`` and rewrite coefficients in the G1/G2 basis."""
    if field.variables.name != "homogeneous":
        raise FieldError("to_nonhomogeneous expects a homogeneous field")
    target = VariableSet("nonhomogeneous", NONHOMOGENEOUS, field.variables.points)
    images = _per_point(_HOMO_TO_NONHOMO, field.variables.points)
    result = substitute_odd(field, images, target, lambda element: basis_convert(element, NONHOMOGENEOUS))
    result.label = field.label
    return result


def to_homogeneous(field: NsField) -> NsField:
    """Inverse of :func:`to_nonhomogeneous`."""
    if field.variables.name != "nonhomogeneous":
        raise FieldError("to_homogeneous expects a nonhomogeneous field")
    target = VariableSet("homogeneous", HOMOGENEOUS, field.variables.points)
    images = _per_point(_NONHOMO_TO_HOMO, field.variables.points)
    result = substitute_odd(field, images, target, lambda element: basis_convert(element, HOMOGENEOUS))
    result.label = field.label
    return result


# ---------------------------------------------------------------------------
# Brackets and the operator product expansion

def _element_parity(element: NsElement) -> int:
    parity = element.parity()
    if parity is None:
        raise FieldError("coefficient has no definite parity")
    return parity


def field_bracket(left: NsField, right: NsField) -> NsField:
    """``[Y(u, 1), Y(v, 2)]`` coefficient by coefficient.

    With ``Y(u) = sum odd1^S x1^a A`` and ``Y(v) = sum odd2^T x2^b B`` the
    coefficient of ``odd1^S odd2^T x1^a x2^b`` is ``(-1)^{|A||T|} [A, B]``.
    """
    if left.variables != right.variables or left.variables.points != 1:
        raise FieldError("field_bracket expects two one-point fields on the same variable set")
    width = left.variables.odd_per_point
    variables = left.variables.with_points(2)
    region = (left.region[0], right.region[0])
    terms: Dict[Key, NsElement] = {}
    for (exps_a, mask_a), a_value in left.terms.items():
        a_parity = _element_parity(a_value)
        for (exps_b, mask_b), b_value in right.terms.items():
            bracket = ns_bracket(a_value, b_value)
            if bracket.is_zero():
                continue
            if a_parity and popcount(mask_b) % 2:
                bracket = -bracket
            terms[((exps_a[0], exps_b[0]), mask_a | (mask_b << width))] = bracket
    return NsField(variables, region, terms, {}, None, left.generator_count)


def _theta_powers(width: int) -> List[Dict[int, Scalar]]:
    """Powers of ``theta = phi1+ phi2- + phi1- phi2+`` as odd polynomials (homogeneous set)."""
    if width != 2:
        raise FieldError("the shift theta is defined for the homogeneous variable set")
    theta = {0b1001: ONE, 0b0110: ONE}
    powers = [{0: ONE}]
    for _ in range(2):
        current = powers[-1]
        step: Dict[int, Scalar] = {}
        for left, lvalue in current.items():
            for right, rvalue in theta.items():
                if left & right:
                    continue
                step[left | right] = step.get(left | right, ZERO) + lvalue * rvalue * merge_sign(left, right)
        powers.append({key: value for key, value in step.items() if not value.is_zero()})
    return powers


def _kernel_term(prefix: Dict[int, Scalar], field: NsField, order: int, window: int) -> NsField:
    """``prefix(odd) * Y(w, 2) * K_order`` with ``K_j = (1/j!) d^j/dx2^j e^{theta d/dx2} x1^-1 delta(x2/x1)``.

    ``field`` is a one-point field placed at point 2 and must be exact on
    every exponent the output window needs.
    """
    width = field.variables.odd_per_point
    thetas = _theta_powers(width)
    variables = field.variables.with_points(2)
    terms: Dict[Key, NsElement] = {}
    j_factorial = _falling(order, order)
    lo, hi = field.region[0]
    for a in range(-window, window + 1):
        n = -a - 1
        for b in range(-window, window + 1):
            for m, theta in enumerate(thetas):
                p = order + m
                count = _falling(n, p)
                if count == 0:
                    continue
                source = b + a + 1 + p
                if not lo <= source <= hi:
                    raise FieldError("auxiliary field window too small for the kernel")
                weight = Scalar(Fraction(count, j_factorial * _falling(m, m)))
                for (exps, own), value in field.terms.items():
                    if exps[0] != source:
                        continue
                    own_shifted = own << width
                    for theta_mask, theta_value in theta.items():
                        if theta_mask & own_shifted:
                            continue
                        inner = theta_value * merge_sign(theta_mask, own_shifted)
                        inner_mask = theta_mask | own_shifted
                        for prefix_mask, prefix_value in prefix.items():
                            if prefix_mask & inner_mask:
                                continue
                            factor = weight * inner * prefix_value * merge_sign(prefix_mask, inner_mask)
                            key = ((a, b), prefix_mask | inner_mask)
                            term = value.scale(factor)
                            terms[key] = terms[key] + term if key in terms else term
    return NsField(variables, _window_region(window, 2), terms, {}, None, field.generator_count)


def _constant_field(element: NsElement, variables: VariableSet, window: int) -> NsField:
    """The constant field ``element * x^0`` on a one-point variable set."""
    return NsField(variables, _window_region(window), {((0,), 0): element}, {}, None, element.generator_count)


def ope_rhs_mu(window: int = DEFAULT_WINDOW, generator_count: int = DEFAULT_GENERATORS) -> NsField:
    """The commutator ``[Y(mu, 1), Y(mu, 2)]`` predicted by the singular part of the ``mu``-``mu`` OPE.

    Each singular term ``F(x2, phi2) / Delta^{j+1}`` with
    ``Delta = x1 - x2 - phi1+ phi2- - phi1- phi2+`` contributes ``F * K_j``
    (see :func:`_kernel_term`).  The central charge enters as the central
    element ``d``.
    """
    if window < MIN_OPE_WINDOW:
        raise FieldError(f"window must be at least {MIN_OPE_WINDOW}")
    wide = 2 * window + 4
    tau_plus = build_field("tau_plus", HOMO, wide, generator_count)
    tau_minus = build_field("tau_minus", HOMO, wide, generator_count)
    mu = build_field("mu", HOMO, wide, generator_count)
    mu_dx = build_field("Lm1_mu", HOMO, wide, generator_count)
    central = _constant_field(NsElement.basis(NsBasisElement("d", 0, HOMOGENEOUS), generator_count, Scalar(Fraction(1, 3))), HOMO, wide)
    # odd prefixes in (phi1+, phi1-, phi2+, phi2-)
    plus = {0b0001: ONE, 0b0100: -ONE}
    minus = {0b0010: ONE, 0b1000: -ONE}
    both = _odd_product(plus, minus)
    both_scaled = {key: value * -2 for key, value in both.items()}
    result = _kernel_term({0: ONE}, central, 1, window)
    result = result + _kernel_term(plus, tau_plus, 0, window)
    result = result + _kernel_term(minus, tau_minus, 0, window)
    result = result + _kernel_term(both_scaled, mu, 1, window)
    result = result + _kernel_term(both_scaled, mu_dx, 0, window)
    return result


def _odd_product(left: Dict[int, Scalar], right: Dict[int, Scalar]) -> Dict[int, Scalar]:
    result: Dict[int, Scalar] = {}
    for lmask, lvalue in left.items():
        for rmask, rvalue in right.items():
            if lmask & rmask:
                continue
            key = lmask | rmask
            result[key] = result.get(key, ZERO) + lvalue * rvalue * merge_sign(lmask, rmask)
    return {key: value for key, value in result.items() if not value.is_zero()}


def _report(identity_id: str, window: int, lhs: NsField, rhs: NsField, region: Optional[Region] = None) -> DeltaReport:
    region = region or _intersect(lhs.region, rhs.region)
    return DeltaReport(identity_id, window, [tuple(bound) for bound in region], lhs.difference_on(rhs, region))


def check_bracket_vs_ope(window: int = DEFAULT_WINDOW, flavor: str = HOMOGENEOUS) -> DeltaReport:
    """``field_bracket(Y(mu), Y(mu))`` against :func:`ope_rhs_mu` with symbolic central charge."""
    mu = build_field("mu", HOMO, window)
    lhs = field_bracket(mu, mu)
    rhs = ope_rhs_mu(window)
    if flavor == NONHOMOGENEOUS:
        mu = build_field("mu", NONHOMO, window)
        lhs = field_bracket(mu, mu)
        rhs = to_nonhomogeneous(rhs)
    return _report(f"bracket-vs-ope[{flavor}]", window, lhs, rhs)


# ---------------------------------------------------------------------------
# Residue extraction of the NS relations

def _mode_locations(field: NsField) -> Dict[NsBasisElement, Tuple[int, int, Scalar]]:
    """Each mode appearing alone in a coefficient of ``field``: ``mode -> (exponent, mask, scalar)``."""
    result = {}
    for ((k,), mask), value in field.terms.items():
        items = list(value.items())
        if len(items) != 1:
            continue
        mode, coeff = items[0]
        if not coeff.is_scalar():
            continue
        result[mode] = (k, mask, coeff.body())
    return result


def extract_ns_relations(commutator: NsField, mu_field: NsField, index_range: Tuple[int, int] = (-3, 3)) -> DeltaReport:
    """Read ``[X_m, Y_n]`` off a ``mu``-``mu`` commutator and compare with ``ns_bracket``.

    ``X_m`` is located in ``Y(mu)`` as ``s * X_m`` at ``odd^S x^a`` and
    likewise ``t * Y_n`` at ``odd^T x^b``; the commutator coefficient at
    ``odd1^S odd2^T x1^a x2^b`` is then ``s t (-1)^{|X||T|} [X_m, Y_n]``.
    """
    tag = mu_field.basis_tag
    width = mu_field.variables.odd_per_point
    locations = _mode_locations(mu_field)
    lo, hi = index_range
    modes = [mode for mode in locations if mode.kind != "d" and lo <= mode.index <= hi]
    modes.sort(key=_order_key)
    mismatches = []
    checked = 0
    for left in modes:
        a, mask_s, s = locations[left]
        for right in modes:
            b, mask_t, t = locations[right]
            if not (commutator.contains((a, b))):
                continue
            value = commutator.coefficient((a, b), mask_s | (mask_t << width))
            factor = s * t
            if left.parity and popcount(mask_t) % 2:
                factor = -factor
            extracted = value.scale(factor.inverse())
            expected = ns_bracket(NsElement.basis(left, commutator.generator_count), NsElement.basis(right, commutator.generator_count))
            checked += 1
            if extracted != expected:
                mismatches.append({"left": str(left), "right": str(right), "extracted": str(extracted), "expected": str(expected)})
    report = DeltaReport(f"ns-relations-from-ope[{tag}]", commutator.region[0][1], [tuple(b) for b in commutator.region], mismatches)
    report.checked = checked  # type: ignore[attr-defined]
    return report


# ---------------------------------------------------------------------------
# Derivative properties

DERIVATIVE_KINDS = ("Dplus", "Dminus", "D", "Dj1", "Dj2")


def _derivative_operator(which: str, variables: VariableSet) -> Tuple[Optional[int], Optional[int], NsBasisElement]:
    """``(odd bit differentiated, odd bit multiplying d/dx, mode)`` for ``(d/dphi + phi' d/dx) Y(v) = Y(mode v)``."""
    tag = variables.basis_tag
    if which == "D":
        return None, None, _mode("L", -1, tag)
    if variables.name == "homogeneous":
        table = {"Dplus": (0, 1, "Gplus"), "Dminus": (1, 0, "Gminus")}
    elif variables.name == "nonhomogeneous":
        table = {"Dj1": (0, 0, "G1"), "Dj2": (1, 1, "G2")}
    elif variables.name == "one_variable":
        table = {"Dj1": (0, 0, "G1")}
    else:
        table = {}
    if which not in table:
        raise FieldError(f"derivative {which!r} is not defined on the {variables.name} variable set")
    bit, partner, kind = table[which]
    return bit, partner, _mode(kind, 0, tag)


def _label_vector(label, basis_tag: str) -> Vector:
    if isinstance(label, FieldLabel):
        vector = label.as_vector()
        return vector if label.basis_tag == basis_tag else convert_vector(vector, basis_tag)
    return field_label(str(label), basis_tag).as_vector()


def check_derivative_property(label, which: str, variables: VariableSet = HOMO, window: int = DEFAULT_WINDOW) -> DeltaReport:
    """``(d/dphi + phi' d/dx) Y(v) = Y(G(-1/2) v)`` or ``d/dx Y(v) = Y(L(-1) v)``."""
    bit, partner, mode = _derivative_operator(which, variables)
    field = build_field(label, variables, window)
    dx = field.derivative_x()
    lhs = dx if bit is None else field.derivative_odd(bit) + dx.multiply_odd(1 << partner)
    image = apply_mode(mode, _label_vector(label, variables.basis_tag))
    rhs = field_of_vector(image, variables, window)
    name = label.name if isinstance(label, FieldLabel) else label
    return _report(f"derivative[{which},{name},{variables.name}]", window, lhs, rhs)


# ---------------------------------------------------------------------------
# Bracket specializations with L(0), J(0), G(1/2)

# (operator kind, mode index) -> [(x power, odd mask, scalar, mode kind, mode index)]
def _specializations(variables: VariableSet):
    tag = variables.basis_tag
    half, i = HALF, I
    if variables.name == "homogeneous":
        return {
            ("L", 0): [(0, 0, ONE, "L", 0), (0, 1, half, "Gplus", 0), (0, 2, half, "Gminus", 0), (1, 0, ONE, "L", -1)],
            ("J", 0): [(0, 0, ONE, "J", 0), (0, 1, ONE, "Gplus", 0), (0, 2, -ONE, "Gminus", 0), (0, 3, Scalar(-2), "L", -1)],
            ("Gplus", 1): [
                (0, 0, ONE, "Gplus", 1), (0, 2, Scalar(-2), "L", 0), (0, 2, -ONE, "J", 0),
                (0, 3, ONE, "Gplus", 0), (1, 0, ONE, "Gplus", 0), (1, 2, Scalar(-2), "L", -1),
            ],
            ("Gminus", 1): [
                (0, 0, ONE, "Gminus", 1), (0, 1, Scalar(-2), "L", 0), (0, 1, ONE, "J", 0),
                (0, 3, -ONE, "Gminus", 0), (1, 0, ONE, "Gminus", 0), (1, 1, Scalar(-2), "L", -1),
            ],
        }
    if variables.name == "nonhomogeneous":
        return {
            ("L", 0): [(0, 0, ONE, "L", 0), (0, 1, half, "G1", 0), (0, 2, half, "G2", 0), (1, 0, ONE, "L", -1)],
            ("J", 0): [(0, 0, ONE, "J", 0), (0, 1, -i, "G2", 0), (0, 2, i, "G1", 0), (0, 3, i * 2, "L", -1)],
            ("G1", 1): [
                (0, 0, ONE, "G1", 1), (0, 1, Scalar(-2), "L", 0), (0, 2, i, "J", 0),
                (0, 3, -ONE, "G2", 0), (1, 0, ONE, "G1", 0), (1, 1, Scalar(-2), "L", -1),
            ],
            ("G2", 1): [
                (0, 0, ONE, "G2", 1), (0, 2, Scalar(-2), "L", 0), (0, 1, -i, "J", 0),
                (0, 3, ONE, "G1", 0), (1, 0, ONE, "G2", 0), (1, 2, Scalar(-2), "L", -1),
            ],
        }
    raise FieldError("bracket specializations are defined for the two-odd-variable sets")


def _bracket_with_mode(mode: NsBasisElement, field: NsField) -> NsField:
    """``[X, Y(v)]`` coefficient by coefficient: ``(-1)^{|X||S|} odd^S x^k [X, A]``."""
    element = NsElement.basis(mode, field.generator_count)
    terms = {}
    for (exps, mask), value in field.terms.items():
        bracket = ns_bracket(element, value)
        if mode.parity and popcount(mask) % 2:
            bracket = -bracket
        terms[(exps, mask)] = bracket
    return field._new(terms, {})


def check_bracket_specializations(label, variables: VariableSet = HOMO, window: int = DEFAULT_WINDOW) -> List[DeltaReport]:
    """``[L(0), Y(v)]``, ``[J(0), Y(v)]`` and ``[G(1/2), Y(v)]`` against their closed forms."""
    tag = variables.basis_tag
    field = build_field(label, variables, window)
    vector = _label_vector(label, tag)
    name = label.name if isinstance(label, FieldLabel) else label
    reports = []
    for (kind, index), pieces in _specializations(variables).items():
        operator = _mode(kind, index, tag)
        lhs = _bracket_with_mode(operator, field)
        rhs = NsField(variables, _window_region(window), {}, {}, None, field.generator_count)
        for x_power, mask, scalar, mode_kind, mode_index in pieces:
            image = apply_mode(_mode(mode_kind, mode_index, tag), vector)
            if not image:
                continue
            piece = field_of_vector(image, variables, window).scale(scalar)
            if mask:
                piece = piece.multiply_odd(mask)
            if x_power:
                piece = piece.multiply_x(x_power)
            rhs = rhs + piece
        reports.append(_report(f"bracket[{operator},{name},{variables.name}]", window, lhs, rhs))
    return reports


# ---------------------------------------------------------------------------
# Grading

def _ad_weight(mode: NsBasisElement) -> Fraction:
    return Fraction(0) if mode.kind == "d" else -mode.mode


def _ad_charge(mode: NsBasisElement) -> int:
    return 1 if mode.kind == "Gplus" else -1 if mode.kind == "Gminus" else 0


def check_grading(label, variables: VariableSet = HOMO, window: int = DEFAULT_WINDOW) -> DeltaReport:
    """The ``odd^S x^k`` coefficient of ``Y(v)`` has ``ad L(0)`` weight ``wt v + k + |S|/2``
    and, in the homogeneous set, ``ad J(0)`` charge ``wt^J v + #phi+ - #phi-``."""
    field = build_field(label, variables, window)
    info = field.label
    mismatches = []
    for ((k,), mask), value in sorted(field.terms.items()):
        expected = info.weight + k + Fraction(popcount(mask), 2)
        for mode in dict(value.items()):
            if _ad_weight(mode) != expected:
                mismatches.append({"exponent": k, "mask": mask, "mode": str(mode), "weight": str(_ad_weight(mode)), "expected": str(expected)})
            if variables.name == "homogeneous" and info.j_weight is not None:
                charge = info.j_weight + (mask & 1) - ((mask >> 1) & 1)
                if _ad_charge(mode) != charge:
                    mismatches.append({"exponent": k, "mask": mask, "mode": str(mode), "charge": _ad_charge(mode), "expected": charge})
    return DeltaReport(f"grading[{info.name},{variables.name}]", window, [tuple(b) for b in field.region], mismatches)


# ---------------------------------------------------------------------------
# Conjugation by x0^{2 L(0)} and x0^{J(0)}

def _power(value: Scalar, exponent: int) -> Scalar:
    return value ** exponent if exponent >= 0 else value.inverse() ** (-exponent)


def _conjugate_element(element: NsElement, operator: str, parameter: Scalar) -> NsElement:
    """``p^{2L(0)} A p^{-2L(0)}`` or ``p^{J(0)} A p^{-J(0)}`` on an algebra element."""
    tag = element.basis_tag
    if operator == "L0":
        terms = {}
        for mode, coeff in element.items():
            exponent = 2 * _ad_weight(mode)
            terms[mode] = coeff.scale(_power(parameter, int(exponent)))
        return NsElement(tag, element.generator_count, terms)
    homogeneous = element if tag == HOMOGENEOUS else basis_convert(element, HOMOGENEOUS)
    scaled = NsElement(HOMOGENEOUS, element.generator_count, {
        mode: coeff.scale(_power(parameter, _ad_charge(mode))) for mode, coeff in homogeneous.items()
    })
    return scaled if tag == HOMOGENEOUS else basis_convert(scaled, tag)


def _conjugate_vector(vector: Vector, operator: str, parameter: Scalar, basis_tag: str) -> Vector:
    if operator == "L0":
        return {mono: value * _power(parameter, int(2 * _monomial_weight(mono))) for mono, value in vector.items()}
    homogeneous = vector if basis_tag == HOMOGENEOUS else convert_vector(vector, HOMOGENEOUS)
    scaled = {mono: value * _power(parameter, _monomial_charge(mono)) for mono, value in homogeneous.items()}
    return scaled if basis_tag == HOMOGENEOUS else convert_vector(scaled, basis_tag)


def _substitute_grading(field: NsField, operator: str, parameter: Scalar) -> NsField:
    """``Y(w, (p^2 x, p phi...))`` or the ``J(0)`` substitution of the odd variables."""
    variables = field.variables
    if operator == "L0":
        result = substitute_odd(field, [{bit: parameter} for bit in range(variables.odd_per_point)], variables, lambda e: e)
        terms = {(exps, mask): value.scale(_power(parameter, 2 * exps[0])) for (exps, mask), value in result.terms.items()}
        identity = {(exps, mask): value * _power(parameter, 2 * exps[0]) for (exps, mask), value in result.identity.items()}
        return NsField(variables, field.region, terms, identity, None, field.generator_count)
    inverse = parameter.inverse()
    if variables.name == "homogeneous":
        images = [{0: parameter}, {1: inverse}]
    elif variables.name == "nonhomogeneous":
        plus = (parameter + inverse) * HALF
        minus = (parameter - inverse) * HALF
        images = [{0: plus, 1: I * minus}, {0: -I * minus, 1: plus}]
    else:
        raise FieldError("J(0) conjugation is defined for the two-odd-variable sets")
    return substitute_odd(field, images, variables, lambda e: e)


def conjugate_field_by_grading(label, operator: str, parameter, variables: VariableSet = HOMO, window: int = DEFAULT_WINDOW) -> Tuple[NsField, NsField]:
    """Both sides of ``p^{2L(0)} Y(v) p^{-2L(0)} = Y(p^{2L(0)} v, (p^2 x, p phi...))``
    (``operator = "L0"``) or of the ``J(0)`` analogue (``operator = "J0"``),
    for a nonzero scalar ``p``.
    """
    if operator not in ("L0", "J0"):
        raise FieldError("operator must be L0 or J0")
    parameter = Scalar.coerce(parameter)
    if parameter.is_zero():
        raise FieldError("the conjugation parameter must be nonzero")
    field = build_field(label, variables, window)
    lhs = field.map_coefficients(lambda element: _conjugate_element(element, operator, parameter))
    image = _conjugate_vector(_label_vector(label, variables.basis_tag), operator, parameter, variables.basis_tag)
    rhs = _substitute_grading(field_of_vector(image, variables, window), operator, parameter)
    return lhs, rhs


def check_conjugation(label, operator: str, parameter, variables: VariableSet = HOMO, window: int = DEFAULT_WINDOW) -> DeltaReport:
    lhs, rhs = conjugate_field_by_grading(label, operator, parameter, variables, window)
    name = label.name if isinstance(label, FieldLabel) else label
    return _report(f"conjugation[{operator},{parameter},{name},{variables.name}]", window, lhs, rhs)


# ---------------------------------------------------------------------------
# Reconstruction from the modes-only field and the D-actions

def reconstruct_field(label, variables: VariableSet = HOMO, window: int = DEFAULT_WINDOW) -> NsField:
    """Rebuild ``Y(v, (x, odd...))`` from modes-only fields ``Y(w, x)`` and the ``G(-1/2)`` actions.

    Homogeneous: ``Y(v,x) + phi+ Y(D+v,x) + phi- Y(D-v,x) + 1/2 phi+ phi- Y((D-D+ - D+D-)v,x)``.
    Nonhomogeneous: ``Y(v,x) + phi1 Y(D1 v,x) + phi2 Y(D2 v,x) - phi1 phi2 Y(D1 D2 v,x)``.
    One variable: ``Y(v,x) + phi Y(D1 v,x)``.
    """
    tag = variables.basis_tag
    modes = variable_set("modes", tag)
    vector = _label_vector(label, tag)

    def plain(image: Vector) -> NsField:
        field = field_of_vector(image, modes, window)
        return NsField(variables, field.region, field.terms, field.identity, None, field.generator_count)

    def act(kind: str, vec: Vector) -> Vector:
        return apply_mode(_mode(kind, 0, tag), vec)

    if variables.name == "homogeneous":
        plus, minus = act("Gplus", vector), act("Gminus", vector)
        mixed = add_vectors((HALF, act("Gminus", plus)), (-HALF, act("Gplus", minus)))
        result = plain(vector) + plain(plus).multiply_odd(1) + plain(minus).multiply_odd(2) + plain(mixed).multiply_odd(3)
    elif variables.name == "nonhomogeneous":
        one, two = act("G1", vector), act("G2", vector)
        result = plain(vector) + plain(one).multiply_odd(1) + plain(two).multiply_odd(2) + plain(act("G1", two)).multiply_odd(3, -ONE)
    elif variables.name == "one_variable":
        result = plain(vector) + plain(act("G1", vector)).multiply_odd(1)
    else:
        raise FieldError("reconstruction needs odd variables")
    result.label = field_label(label.name if isinstance(label, FieldLabel) else str(label), tag)
    return result


def check_reconstruction(label, variables: VariableSet = HOMO, window: int = DEFAULT_WINDOW) -> DeltaReport:
    name = label.name if isinstance(label, FieldLabel) else label
    return _report(f"reconstruct[{name},{variables.name}]", window, reconstruct_field(label, variables, window), build_field(label, variables, window))


# ---------------------------------------------------------------------------
# Weak supercommutativity

def _delta_power(k: int, width: int) -> Dict[Tuple[Tuple[int, int], int], Scalar]:
    """``(x1 - x2 - phi1+ phi2- - phi1- phi2+)^k`` as ``{((i, j), mask): scalar}``."""
    base = {((1, 0), 0): ONE, ((0, 1), 0): -ONE}
    for mask, value in _theta_powers(width)[1].items():
        base[((0, 0), mask)] = -value
    result = {((0, 0), 0): ONE}
    for _ in range(k):
        step: Dict = {}
        for (le, lm), lv in result.items():
            for (re, rm), rv in base.items():
                if lm & rm:
                    continue
                key = ((le[0] + re[0], le[1] + re[1]), lm | rm)
                step[key] = step.get(key, ZERO) + lv * rv * merge_sign(lm, rm)
        result = {key: value for key, value in step.items() if not value.is_zero()}
    return result


def weak_supercommutativity_mu(k: int, window: int = DEFAULT_WINDOW, label: str = "mu") -> DeltaReport:
    """``Delta^k [Y(u,1), Y(mu,2)]`` on the region where the product is exact; passes when it vanishes."""
    if k < 1:
        raise FieldError("k must be positive")
    if window < k + 6:
        raise FieldError(f"window must be at least k + 6 = {k + 6}")
    left = build_field(label, HOMO, window)
    right = build_field("mu", HOMO, window)
    if label == "vac":
        bracket = NsField(HOMO.with_points(2), _window_region(window, 2), {}, {}, None, left.generator_count)
    else:
        bracket = field_bracket(left, right)
    polynomial = _delta_power(k, 2)
    (lo1, hi1), (lo2, hi2) = bracket.region
    region = ((lo1 + k, hi1), (lo2 + k, hi2))
    terms: Dict[Key, NsElement] = {}
    for (exps, mask), value in bracket.terms.items():
        for ((i, j), pmask), pvalue in polynomial.items():
            if pmask & mask:
                continue
            key = ((exps[0] + i, exps[1] + j), pmask | mask)
            term = value.scale(pvalue * merge_sign(pmask, mask))
            terms[key] = terms[key] + term if key in terms else term
    product = NsField(bracket.variables, region, terms, {}, None, bracket.generator_count)
    zero = NsField(bracket.variables, region, {}, {}, None, bracket.generator_count)
    return _report(f"weak-supercommutativity[k={k},{label}]", window, product, zero, region)


# ---------------------------------------------------------------------------
# Suite

FIELD_LABELS = {
    HOMOGENEOUS: ("vac", "mu", "tau_plus", "tau_minus", "omega"),
    NONHOMOGENEOUS: ("vac", "mu", "tau1", "tau2", "omega"),
}
CONJUGATION_PARAMETERS = (Scalar(2), Scalar(1, 0, 1), Scalar(Fraction(1, 3)))


def run_field_checks(window: int = DEFAULT_WINDOW) -> List[DeltaReport]:
    """Every field identity of the suite; negative controls are reported as passing when they fail."""
    reports: List[DeltaReport] = []
    reports.append(check_bracket_vs_ope(window, HOMOGENEOUS))
    reports.append(check_bracket_vs_ope(window, NONHOMOGENEOUS))
    ope = ope_rhs_mu(window)
    reports.append(extract_ns_relations(ope, build_field("mu", HOMO, window)))
    reports.append(extract_ns_relations(to_nonhomogeneous(ope), build_field("mu", NONHOMO, window)))
    for variables, kinds in ((HOMO, ("Dplus", "Dminus", "D")), (NONHOMO, ("Dj1", "Dj2", "D")), (ONE_VARIABLE, ("Dj1", "D"))):
        labels = FIELD_LABELS[variables.basis_tag]
        for label in labels:
            for which in kinds:
                reports.append(check_derivative_property(label, which, variables, window))
    for variables in (HOMO, NONHOMO):
        for label in FIELD_LABELS[variables.basis_tag]:
            reports.extend(check_bracket_specializations(label, variables, window))
            reports.append(check_grading(label, variables, window))
            reports.append(check_reconstruction(label, variables, window))
            if label == "vac":
                continue
            for operator in ("L0", "J0"):
                for parameter in CONJUGATION_PARAMETERS:
                    reports.append(check_conjugation(label, operator, parameter, variables, window))
    for label in FIELD_LABELS[NONHOMOGENEOUS]:
        reports.append(check_reconstruction(label, ONE_VARIABLE, window))
    reports.append(check_nonhomogeneous_mu(window))
    for label in FIELD_LABELS[NONHOMOGENEOUS][1:]:
        reports.append(check_flavor_consistency(label, window))
    reports.append(check_round_trip("mu", window))
    reports.append(weak_supercommutativity_mu(4, window))
    negative = weak_supercommutativity_mu(1, window)
    reports.append(DeltaReport("weak-supercommutativity-negative-control[k=1]", window, negative.safe_region,
                               [] if negative.mismatches else [{"error": "k=1 product vanished; the checker cannot fail"}]))
    return reports


def check_nonhomogeneous_mu(window: int = DEFAULT_WINDOW) -> DeltaReport:
    """``to_nonhomogeneous(Y(mu))`` against the printed nonhomogeneous expansion."""
    return _report("to-nonhomogeneous[mu]", window, to_nonhomogeneous(build_field("mu", HOMO, window)), build_field("mu", NONHOMO, window))


def check_flavor_consistency(label: str, window: int = DEFAULT_WINDOW) -> DeltaReport:
    """The printed nonhomogeneous ``Y(v)`` against the substituted homogeneous fields of the same vector."""
    vector = convert_vector(field_label(label, NONHOMOGENEOUS).as_vector(), HOMOGENEOUS)
    converted = to_nonhomogeneous(field_of_vector(vector, HOMO, window))
    return _report(f"flavor-consistency[{label}]", window, converted, build_field(label, NONHOMO, window))


def check_round_trip(label: str, window: int = DEFAULT_WINDOW) -> DeltaReport:
    field = build_field(label, NONHOMO, window)
    return _report(f"flavor-round-trip[{label}]", window, to_nonhomogeneous(to_homogeneous(field)), field)
