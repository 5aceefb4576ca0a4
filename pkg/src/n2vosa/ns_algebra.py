"""The N=2 Neveu-Schwarz Lie superalgebra in the homogeneous and nonhomogeneous bases.

Basis elements are ``L_n``, ``J_n``, the central element ``d`` and odd
elements.  An odd basis element of kind ``G...`` with integer index ``n``
denotes the mode ``n - 1/2``, so ``G+(1/2)`` has index 1.  Coefficients are
Grassmann elements; the bracket is extended by
``[a u, b v] = (-1)^(|u| |b|) a b [u, v]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ._exprparse import ExpressionParser, ParseError
from .grassmann import (
    I,
    ONE,
    R2,
    ZERO,
    GrassmannElement,
    Scalar,
    popcount,
)
from .linalg import in_span

HOMOGENEOUS = "homogeneous"
NONHOMOGENEOUS = "nonhomogeneous"
BASIS_TAGS = (HOMOGENEOUS, NONHOMOGENEOUS)

EVEN_KINDS = ("L", "J", "d")
HOMOGENEOUS_ODD = ("Gplus", "Gminus")
NONHOMOGENEOUS_ODD = ("G1", "G2")
KIND_SYMBOL = {"L": "L", "J": "J", "d": "d", "Gplus": "G+", "Gminus": "G-", "G1": "G1", "G2": "G2"}
SYMBOL_KIND = {symbol: kind for kind, symbol in KIND_SYMBOL.items()}

INV_R2 = Scalar(0, Fraction(1, 2))  # 1/sqrt(2)
DEFAULT_GENERATORS = 4
DEFAULT_RANGE = (-4, 4)


class NsError(ValueError):
    """Raised for mixed bases, invalid basis elements and bad automorphism data."""


@dataclass(frozen=True, order=True)
class NsBasisElement:
    kind: str
    index: int
    basis_tag: str = HOMOGENEOUS

    def __post_init__(self):
        if self.basis_tag not in BASIS_TAGS:
            raise NsError(f"unknown basis tag {self.basis_tag!r}")
        if self.kind in HOMOGENEOUS_ODD and self.basis_tag != HOMOGENEOUS:
            raise NsError("G+/G- belong to the homogeneous basis")
        if self.kind in NONHOMOGENEOUS_ODD and self.basis_tag != NONHOMOGENEOUS:
            raise NsError("G1/G2 belong to the nonhomogeneous basis")
        if self.kind not in KIND_SYMBOL:
            raise NsError(f"unknown kind {self.kind!r}")
        if self.kind == "d" and self.index != 0:
            raise NsError("the central element carries no index")

    @property
    def parity(self) -> int:
        return 0 if self.kind in EVEN_KINDS else 1

    @property
    def mode(self) -> Fraction:
        """The mode number: ``n`` for even kinds and ``n - 1/2`` for odd kinds."""
        return Fraction(self.index) if self.parity == 0 else Fraction(2 * self.index - 1, 2)

    def retag(self, basis_tag: str) -> "NsBasisElement":
        return NsBasisElement(self.kind, self.index, basis_tag)

    def __str__(self) -> str:
        if self.kind == "d":
            return "d"
        mode = self.mode
        text = str(mode.numerator) if mode.denominator == 1 else f"{mode.numerator}/{mode.denominator}"
        return f"{KIND_SYMBOL[self.kind]}({text})"


def L(n: int, basis_tag: str = HOMOGENEOUS) -> NsBasisElement:
    return NsBasisElement("L", n, basis_tag)


def J(n: int, basis_tag: str = HOMOGENEOUS) -> NsBasisElement:
    return NsBasisElement("J", n, basis_tag)


def D(basis_tag: str = HOMOGENEOUS) -> NsBasisElement:
    return NsBasisElement("d", 0, basis_tag)


def G(kind: str, index: int) -> NsBasisElement:
    """Odd basis element by kind symbol (``+``, ``-``, ``1``, ``2``) and integer index."""
    full = {"+": "Gplus", "-": "Gminus", "1": "G1", "2": "G2"}.get(kind, kind)
    tag = HOMOGENEOUS if full in HOMOGENEOUS_ODD else NONHOMOGENEOUS
    return NsBasisElement(full, index, tag)


# ---------------------------------------------------------------------------
# Bracket tables on basis elements (scalar valued)

BasisVector = Dict[NsBasisElement, Scalar]


def _add(vector: BasisVector, key: NsBasisElement, value) -> None:
    value = Scalar.coerce(value)
    if value.is_zero():
        return
    total = vector.get(key, ZERO) + value
    if total.is_zero():
        vector.pop(key, None)
    else:
        vector[key] = total


@lru_cache(maxsize=None)
def _basis_bracket(left: NsBasisElement, right: NsBasisElement) -> Tuple[Tuple[NsBasisElement, Scalar], ...]:
    result = _basis_bracket_table(left, right)
    return tuple(sorted(result.items()))


def _basis_bracket_table(u: NsBasisElement, v: NsBasisElement) -> BasisVector:
    tag = u.basis_tag
    if v.basis_tag != tag:
        raise NsError("mixed bases in bracket")
    out: BasisVector = {}
    if u.kind == "d" or v.kind == "d":
        return out
    # ensure a canonical order for the skew-symmetric cases
    order = {"L": 0, "J": 1, "Gplus": 2, "Gminus": 3, "G1": 2, "G2": 3}
    if order[u.kind] > order[v.kind]:
        swapped = _basis_bracket_table(v, u)
        sign = 1 if (u.parity and v.parity) else -1
        return {key: value * sign for key, value in swapped.items()}
    m, n = u.index, v.index
    central = D(tag)
    if u.kind == "L" and v.kind == "L":
        _add(out, L(m + n, tag), m - n)
        if m + n == 0:
            _add(out, central, Fraction(m ** 3 - m, 12))
        return out
    if u.kind == "J" and v.kind == "J":
        if m + n == 0:
            _add(out, central, Fraction(m, 3))
        return out
    if u.kind == "L" and v.kind == "J":
        _add(out, J(m + n, tag), -n)
        return out
    if u.kind == "L" and v.parity == 1:
        # G with index n is the mode n - 1/2
        _add(out, NsBasisElement(v.kind, m + n, tag), Fraction(m, 2) - n + Fraction(1, 2))
        return out
    if u.kind == "J" and v.parity == 1:
        if v.kind == "Gplus":
            _add(out, NsBasisElement("Gplus", m + n, tag), 1)
        elif v.kind == "Gminus":
            _add(out, NsBasisElement("Gminus", m + n, tag), -1)
        elif v.kind == "G1":
            _add(out, NsBasisElement("G2", m + n, tag), -I)
        else:
            _add(out, NsBasisElement("G1", m + n, tag), I)
        return out
    # both odd: u = G_{a-1/2}, v = G_{b-1/2}; total mode a + b - 1
    a, b = m, n
    total = a + b - 1
    central_term = Fraction((a - 1) * a, 3) if total == 0 else Fraction(0)
    if tag == HOMOGENEOUS:
        if u.kind == v.kind:
            return out
        # u is G+ (order ensures), v is G-
        _add(out, L(total, tag), 2)
        _add(out, J(total, tag), a - b)
        _add(out, central, central_term)
        return out
    if u.kind == v.kind:
        _add(out, L(total, tag), 2)
        _add(out, central, central_term)
        return out
    # u is G1, v is G2
    _add(out, J(total, tag), -I * (a - b))
    return out


def basis_bracket(u: NsBasisElement, v: NsBasisElement) -> BasisVector:
    return dict(_basis_bracket(u, v))


# ---------------------------------------------------------------------------
# Elements


class NsElement:
    """Finite Grassmann-linear combination of basis elements in one basis."""

    __slots__ = ("basis_tag", "generator_count", "_terms")

    def __init__(self, basis_tag: str, generator_count: int = DEFAULT_GENERATORS, terms: Optional[Dict[NsBasisElement, GrassmannElement]] = None):
        if basis_tag not in BASIS_TAGS:
            raise NsError(f"unknown basis tag {basis_tag!r}")
        self.basis_tag = basis_tag
        self.generator_count = generator_count
        self._terms: Dict[NsBasisElement, GrassmannElement] = {}
        for key, coeff in (terms or {}).items():
            if key.basis_tag != basis_tag:
                raise NsError("mixed bases in element")
            if not isinstance(coeff, GrassmannElement):
                coeff = GrassmannElement.scalar(generator_count, coeff)
            if not coeff.is_zero():
                self._terms[key] = coeff

    @classmethod
    def zero(cls, basis_tag: str = HOMOGENEOUS, generator_count: int = DEFAULT_GENERATORS) -> "NsElement":
        return cls(basis_tag, generator_count)

    @classmethod
    def basis(cls, element: NsBasisElement, generator_count: int = DEFAULT_GENERATORS, coeff=ONE) -> "NsElement":
        return cls(element.basis_tag, generator_count, {element: coeff})

    @classmethod
    def from_vector(cls, vector: BasisVector, basis_tag: str, generator_count: int = DEFAULT_GENERATORS) -> "NsElement":
        return cls(basis_tag, generator_count, {k: GrassmannElement.scalar(generator_count, v) for k, v in vector.items()})

    @property
    def terms(self) -> Dict[NsBasisElement, GrassmannElement]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, element: NsBasisElement) -> GrassmannElement:
        return self._terms.get(element, GrassmannElement.zero(self.generator_count))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def parity(self) -> Optional[int]:
        parities = set()
        for key, coeff in self._terms.items():
            coeff_parity = coeff.parity()
            if coeff_parity is None:
                return None
            parities.add((key.parity + coeff_parity) % 2)
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def _check(self, other: "NsElement") -> None:
        if not isinstance(other, NsElement):
            raise TypeError("expected NsElement")
        if other.basis_tag != self.basis_tag:
            raise NsError("mixed bases")
        if other.generator_count != self.generator_count:
            raise NsError("mismatched generator counts")

    def __add__(self, other: "NsElement") -> "NsElement":
        self._check(other)
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            terms[key] = terms[key] + coeff if key in terms else coeff
        return NsElement(self.basis_tag, self.generator_count, terms)

    def __neg__(self) -> "NsElement":
        return NsElement(self.basis_tag, self.generator_count, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "NsElement") -> "NsElement":
        return self + (-other)

    def scale(self, factor) -> "NsElement":
        """Left multiplication by a scalar or Grassmann element."""
        if isinstance(factor, GrassmannElement):
            return NsElement(self.basis_tag, self.generator_count, {k: factor * c for k, c in self._terms.items()})
        return NsElement(self.basis_tag, self.generator_count, {k: c.scale(factor) for k, c in self._terms.items()})

    def __rmul__(self, factor) -> "NsElement":
        if isinstance(factor, (Scalar, int, Fraction, GrassmannElement)):
            return self.scale(factor)
        return NotImplemented

    def __mul__(self, factor) -> "NsElement":
        if isinstance(factor, (Scalar, int, Fraction)):
            return self.scale(factor)
        return NotImplemented

    def inverse(self):
        raise ParseError("cannot divide by an algebra element")

    def __eq__(self, other) -> bool:
        if not isinstance(other, NsElement):
            return NotImplemented
        return self.basis_tag == other.basis_tag and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.basis_tag, frozenset(self._terms.items())))

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: _sort_key(kv[0]))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for key, coeff in self.sorted_items():
            if coeff == GrassmannElement.one(self.generator_count):
                pieces.append(str(key))
            elif coeff.is_scalar() and coeff.body().term_count() == 1:
                pieces.append(f"{coeff} * {key}")
            else:
                pieces.append(f"({coeff}) * {key}")
        text = pieces[0]
        for piece in pieces[1:]:
            text += " - " + piece[1:] if piece.startswith("-") else " + " + piece
        return text

    def __repr__(self) -> str:
        return f"NsElement({self})"

    @classmethod
    def parse(cls, text: str, basis_tag: Optional[str] = None, generator_count: int = DEFAULT_GENERATORS) -> "NsElement":
        return parse_element(text, basis_tag, generator_count)


_KIND_ORDER = {"d": 0, "L": 1, "J": 2, "Gplus": 3, "G1": 3, "Gminus": 4, "G2": 4}


def _sort_key(element: NsBasisElement):
    return (_KIND_ORDER[element.kind], element.index)


class _Coeff:
    """Parser value: either a pure coefficient or an algebra element."""

    def __init__(self, coeff: Optional[GrassmannElement] = None, element: Optional[NsElement] = None):
        self.coeff = coeff
        self.element = element

    def __add__(self, other):
        if self.element is not None and other.element is not None:
            return _Coeff(element=self.element + other.element)
        if self.coeff is not None and other.coeff is not None:
            return _Coeff(coeff=self.coeff + other.coeff)
        raise ParseError("cannot add a coefficient to an algebra element")

    def __neg__(self):
        return _Coeff(coeff=-self.coeff) if self.coeff is not None else _Coeff(element=-self.element)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.coeff is not None and other.coeff is not None:
            return _Coeff(coeff=self.coeff * other.coeff)
        if self.coeff is not None:
            return _Coeff(element=other.element.scale(self.coeff))
        if other.coeff is not None and other.coeff.is_scalar():
            return _Coeff(element=self.element.scale(other.coeff.body()))
        raise ParseError("algebra elements cannot be multiplied")

    def inverse(self):
        if self.coeff is None:
            raise ParseError("cannot divide by an algebra element")
        return _Coeff(coeff=self.coeff.inverse())


def parse_basis(text: str, basis_tag: Optional[str] = None) -> NsBasisElement:
    """Parse ``L(3)``, ``J(-1)``, ``G+(1/2)``, ``G1(-3/2)`` or ``d``."""
    text = text.strip()
    if text == "d":
        return D(basis_tag or HOMOGENEOUS)
    if "(" not in text or not text.endswith(")"):
        raise ParseError(f"bad basis element {text!r}")
    symbol, argument = text[:-1].split("(", 1)
    kind = SYMBOL_KIND.get(symbol.strip())
    if kind is None:
        raise ParseError(f"unknown basis symbol {symbol!r}")
    mode = Fraction(argument.replace(" ", ""))
    if kind in EVEN_KINDS:
        if mode.denominator != 1:
            raise ParseError(f"{symbol} needs an integer mode")
        return NsBasisElement(kind, int(mode), basis_tag or HOMOGENEOUS)
    if mode.denominator != 2:
        raise ParseError(f"{symbol} needs a half-integer mode")
    index = int(mode + Fraction(1, 2))
    tag = HOMOGENEOUS if kind in HOMOGENEOUS_ODD else NONHOMOGENEOUS
    if basis_tag is not None and basis_tag != tag:
        raise NsError(f"{symbol} does not belong to the {basis_tag} basis")
    return NsBasisElement(kind, index, tag)


def parse_element(text: str, basis_tag: Optional[str] = None, generator_count: int = DEFAULT_GENERATORS) -> NsElement:
    """Parse linear combinations such as ``2*L(0) + 3*J(0) + 2/3*d``."""
    if basis_tag is None:
        if "G1" in text or "G2" in text:
            basis_tag = NONHOMOGENEOUS
        else:
            basis_tag = HOMOGENEOUS

    def atom(name: str) -> _Coeff:
        if name in ("i", "r2") or (name.startswith("t") and name[1:].replace("t", "").isdigit()):
            return _Coeff(coeff=GrassmannElement.parse(name, generator_count))
        element = parse_basis(name, basis_tag)
        return _Coeff(element=NsElement.basis(element, generator_count))

    def number(value: Fraction) -> _Coeff:
        return _Coeff(coeff=GrassmannElement.scalar(generator_count, value))

    value = ExpressionParser(atom, number).parse(text)
    if value.element is not None:
        return value.element
    if value.coeff.is_zero():
        return NsElement.zero(basis_tag, generator_count)
    raise ParseError("expression is a bare coefficient, not an algebra element")


# ---------------------------------------------------------------------------
# Bracket


def ns_bracket(left: NsElement, right: NsElement) -> NsElement:
    """Super bracket, Grassmann-bilinear with Koszul signs."""
    left._check(right)
    generator_count = left.generator_count
    result: Dict[NsBasisElement, GrassmannElement] = {}
    for u, a in left._terms.items():
        for v, b in right._terms.items():
            table = _basis_bracket(u, v)
            if not table:
                continue
            # moving b past an odd u picks up the sign of b's odd part
            coeff = a * (b.even_part() - b.odd_part()) if u.parity else a * b
            for key, scalar in table:
                term = coeff.scale(scalar)
                result[key] = result[key] + term if key in result else term
    return NsElement(left.basis_tag, generator_count, result)


def bracket_text(left: str, right: str, generator_count: int = DEFAULT_GENERATORS) -> NsElement:
    """Convenience: bracket of two parsed elements (bases inferred from the text)."""
    u = parse_element(left, generator_count=generator_count)
    v = parse_element(right, u.basis_tag, generator_count)
    return ns_bracket(u, v)


# ---------------------------------------------------------------------------
# Basis conversion


def _convert_basis_element(element: NsBasisElement, target: str) -> BasisVector:
    if element.kind in EVEN_KINDS:
        return {element.retag(target): ONE}
    n = element.index
    if target == element.basis_tag:
        return {element: ONE}
    if target == NONHOMOGENEOUS:
        # G+- = (G1 -+ i G2)/sqrt2
        sign = -1 if element.kind == "Gplus" else 1
        return {
            NsBasisElement("G1", n, NONHOMOGENEOUS): INV_R2,
            NsBasisElement("G2", n, NONHOMOGENEOUS): I * INV_R2 * sign,
        }
    # G1 = (G+ + G-)/sqrt2, G2 = i(G+ - G-)/sqrt2
    if element.kind == "G1":
        return {
            NsBasisElement("Gplus", n, HOMOGENEOUS): INV_R2,
            NsBasisElement("Gminus", n, HOMOGENEOUS): INV_R2,
        }
    return {
        NsBasisElement("Gplus", n, HOMOGENEOUS): I * INV_R2,
        NsBasisElement("Gminus", n, HOMOGENEOUS): -I * INV_R2,
    }


def _apply_linear(element: NsElement, images, target: str) -> NsElement:
    result: Dict[NsBasisElement, GrassmannElement] = {}
    for key, coeff in element._terms.items():
        for new_key, value in images(key).items():
            term = coeff * value if isinstance(value, GrassmannElement) else coeff.scale(value)
            result[new_key] = result[new_key] + term if new_key in result else term
    return NsElement(target, element.generator_count, result)


def basis_convert(element: NsElement, to: str) -> NsElement:
    if to not in BASIS_TAGS:
        raise NsError(f"unknown basis tag {to!r}")
    return _apply_linear(element, lambda key: _convert_basis_element(key, to), to)


# ---------------------------------------------------------------------------
# Automorphisms


@dataclass(frozen=True)
class Automorphism:
    """``scale(b)``, ``flip`` or ``flip_scale(b)``, read in the element's basis."""

    kind: str
    parameter: Optional[GrassmannElement] = None

    def __post_init__(self):
        if self.kind not in ("scale", "flip", "flip_scale"):
            raise NsError(f"unknown automorphism {self.kind!r}")
        if self.kind != "flip":
            b = self.parameter
            if b is None:
                raise NsError(f"{self.kind} needs a parameter")
            if b.parity() not in (0,) or b.body().is_zero():
                raise NsError("automorphism parameter must be an invertible even Grassmann element")


def _automorphism_images(auto: Automorphism, key: NsBasisElement, generator_count: int) -> Dict[NsBasisElement, GrassmannElement]:
    one = GrassmannElement.one(generator_count)
    if key.kind in ("L", "d"):
        return {key: one}
    if key.kind == "J":
        return {key: one if auto.kind == "scale" else -one}
    b = auto.parameter
    b_inverse = b.inverse() if b is not None else None
    n = key.index
    tag = key.basis_tag
    if tag == HOMOGENEOUS:
        plus = key.kind == "Gplus"
        if auto.kind == "scale":
            return {key: b if plus else b_inverse}
        other = NsBasisElement("Gminus" if plus else "Gplus", n, tag)
        if auto.kind == "flip":
            return {other: one}
        return {other: b_inverse if plus else b}
    g1 = NsBasisElement("G1", n, tag)
    g2 = NsBasisElement("G2", n, tag)
    if auto.kind == "flip":
        return {key: one if key.kind == "G1" else -one}
    cosh = (b + b_inverse).scale(Fraction(1, 2))
    sinh = (b - b_inverse).scale(Fraction(1, 2))
    i_sinh = sinh.scale(I)
    if auto.kind == "scale":
        if key.kind == "G1":
            return {g1: cosh, g2: -i_sinh}
        return {g1: i_sinh, g2: cosh}
    if key.kind == "G1":
        return {g1: cosh, g2: i_sinh}
    return {g1: i_sinh, g2: -cosh}


def apply_automorphism(element: NsElement, auto: Automorphism) -> NsElement:
    """Apply an automorphism; parameters are even so they commute with every coefficient."""
    if auto.parameter is not None and auto.parameter.generator_count != element.generator_count:
        raise NsError("mismatched generator counts")
    result: Dict[NsBasisElement, GrassmannElement] = {}
    for key, coeff in element._terms.items():
        for new_key, value in _automorphism_images(auto, key, element.generator_count).items():
            term = coeff * value
            result[new_key] = result[new_key] + term if new_key in result else term
    return NsElement(element.basis_tag, element.generator_count, result)


# ---------------------------------------------------------------------------
# Verification


def basis_elements(basis_tag: str, index_range: Tuple[int, int] = DEFAULT_RANGE, include_central: bool = True) -> List[NsBasisElement]:
    low, high = index_range
    odd = HOMOGENEOUS_ODD if basis_tag == HOMOGENEOUS else NONHOMOGENEOUS_ODD
    result = []
    for n in range(low, high + 1):
        result.append(L(n, basis_tag))
        result.append(J(n, basis_tag))
        for kind in odd:
            result.append(NsBasisElement(kind, n, basis_tag))
    if include_central:
        result.append(D(basis_tag))
    return result


def _vector_bracket(left: BasisVector, right: BasisVector) -> BasisVector:
    out: BasisVector = {}
    for u, a in left.items():
        for v, b in right.items():
            for key, value in _basis_bracket(u, v):
                _add(out, key, a * b * value)
    return out


def verify_lie_superalgebra(basis_tag: str = HOMOGENEOUS, index_range: Tuple[int, int] = DEFAULT_RANGE) -> dict:
    """Exhaustive super-skew and super-Jacobi check on basis elements in range."""
    elements = basis_elements(basis_tag, index_range)
    skew_failures = []
    central_failures = []
    parity_failures = []
    for u, v in itertools.product(elements, repeat=2):
        forward = basis_bracket(u, v)
        backward = basis_bracket(v, u)
        sign = -1 if not (u.parity and v.parity) else 1
        if forward != {k: c * sign for k, c in backward.items()}:
            skew_failures.append([str(u), str(v)])
        expected_parity = (u.parity + v.parity) % 2
        if any(key.parity != expected_parity for key in forward):
            parity_failures.append([str(u), str(v)])
        if (u.kind == "d" or v.kind == "d") and forward:
            central_failures.append([str(u), str(v)])
    jacobi_failures = []
    unit = {e: ONE for e in elements}
    for u, v, w in itertools.product(elements, repeat=3):
        pu, pv, pw = u.parity, v.parity, w.parity
        total: BasisVector = {}
        for sign_exp, a, b, c in ((pu * pw, u, v, w), (pv * pu, v, w, u), (pw * pv, w, u, v)):
            inner = basis_bracket(a, b)
            if not inner:
                continue
            outer = _vector_bracket(inner, {c: ONE})
            sign = -1 if sign_exp else 1
            for key, value in outer.items():
                _add(total, key, value * sign)
        if total:
            jacobi_failures.append([str(u), str(v), str(w)])
    return {
        "basis": basis_tag,
        "index_range": list(index_range),
        "element_count": len(elements),
        "skew_failures": skew_failures,
        "parity_failures": parity_failures,
        "central_failures": central_failures,
        "jacobi_failures": jacobi_failures,
        "pass": not (skew_failures or jacobi_failures or central_failures or parity_failures),
    }


def verify_conversion_homomorphism(index_range: Tuple[int, int] = DEFAULT_RANGE, generator_count: int = DEFAULT_GENERATORS) -> dict:
    """``convert([u, v]) == [convert(u), convert(v)]`` for basis pairs, in both directions."""
    failures = []
    for source, target in ((HOMOGENEOUS, NONHOMOGENEOUS), (NONHOMOGENEOUS, HOMOGENEOUS)):
        elements = basis_elements(source, index_range)
        for u, v in itertools.product(elements, repeat=2):
            eu = NsElement.basis(u, generator_count)
            ev = NsElement.basis(v, generator_count)
            lhs = basis_convert(ns_bracket(eu, ev), target)
            rhs = ns_bracket(basis_convert(eu, target), basis_convert(ev, target))
            if lhs != rhs:
                failures.append([source, str(u), str(v)])
    return {"failures": failures, "pass": not failures}


def verify_automorphism(auto: Automorphism, basis_tag: str, index_range: Tuple[int, int] = DEFAULT_RANGE, generator_count: int = DEFAULT_GENERATORS) -> dict:
    """Check ``phi([u, v]) == [phi(u), phi(v)]`` for basis pairs in range."""
    failures = []
    for u, v in itertools.product(basis_elements(basis_tag, index_range), repeat=2):
        eu = NsElement.basis(u, generator_count)
        ev = NsElement.basis(v, generator_count)
        lhs = apply_automorphism(ns_bracket(eu, ev), auto)
        rhs = ns_bracket(apply_automorphism(eu, auto), apply_automorphism(ev, auto))
        if lhs != rhs:
            failures.append([str(u), str(v)])
    return {"automorphism": auto.kind, "basis": basis_tag, "failures": failures, "pass": not failures}


SUBALGEBRA_KINDS = ("osp12_neg", "osp12", "osp22_neg", "osp22", "N1_j1", "N1_j2")


def subalgebra(kind: str, basis_tag: str = HOMOGENEOUS, index_range: Tuple[int, int] = DEFAULT_RANGE) -> List[NsBasisElement]:
    """Spanning sets of the named subalgebras.

    The N=1 type sets (``osp12*`` and ``N1_j*``) live in the nonhomogeneous
    basis and use ``G1`` (``G2`` for ``N1_j2``).  The infinite ``N1_j`` sets
    are cut to the index range.
    """
    if kind not in SUBALGEBRA_KINDS:
        raise NsError(f"unknown subalgebra {kind!r}")
    if kind.startswith("osp22"):
        odd = HOMOGENEOUS_ODD if basis_tag == HOMOGENEOUS else NONHOMOGENEOUS_ODD
        negative = [L(-1, basis_tag)] + [NsBasisElement(k, 0, basis_tag) for k in odd]
        if kind == "osp22_neg":
            return negative
        return negative + [L(0, basis_tag), J(0, basis_tag)] + [NsBasisElement(k, 1, basis_tag) for k in odd] + [L(1, basis_tag)]
    tag = NONHOMOGENEOUS
    if kind.startswith("osp12"):
        negative = [L(-1, tag), NsBasisElement("G1", 0, tag)]
        if kind == "osp12_neg":
            return negative
        return negative + [L(0, tag), NsBasisElement("G1", 1, tag), L(1, tag)]
    odd_kind = "G1" if kind == "N1_j1" else "G2"
    low, high = index_range
    result = []
    for n in range(low, high + 1):
        result.append(L(n, tag))
        result.append(NsBasisElement(odd_kind, n, tag))
    result.append(D(tag))
    return result


def check_subalgebra_closure(kind: str, basis_tag: str = HOMOGENEOUS, index_range: Tuple[int, int] = DEFAULT_RANGE) -> dict:
    """Every bracket of spanning elements lies in their span (brackets leaving the range are skipped)."""
    elements = subalgebra(kind, basis_tag, index_range)
    members = set(elements)
    low, high = index_range
    failures = []
    for u, v in itertools.product(elements, repeat=2):
        result = basis_bracket(u, v)
        if any(key.kind != "d" and not low <= key.index <= high for key in result):
            continue
        if any(key not in members for key in result):
            failures.append([str(u), str(v)])
    return {"subalgebra": kind, "failures": failures, "pass": not failures}


def check_generated_by_g(basis_tag: str = HOMOGENEOUS, index_range: Tuple[int, int] = DEFAULT_RANGE) -> dict:
    """Every ``L_n``, ``J_n`` in range and ``d`` lies in the span of brackets of G modes."""
    low, high = index_range
    odd = HOMOGENEOUS_ODD if basis_tag == HOMOGENEOUS else NONHOMOGENEOUS_ODD
    reach = range(low - 2, high + 3)
    generators = [NsBasisElement(k, n, basis_tag) for k in odd for n in reach]
    vectors = []
    for u, v in itertools.combinations_with_replacement(generators, 2):
        vector = basis_bracket(u, v)
        if vector:
            vectors.append(vector)
    targets = [L(n, basis_tag) for n in range(low, high + 1)] + [J(n, basis_tag) for n in range(low, high + 1)] + [D(basis_tag)]
    missing = [str(t) for t in targets if not in_span(vectors, {t: ONE})]
    return {"basis": basis_tag, "missing": missing, "pass": not missing}
