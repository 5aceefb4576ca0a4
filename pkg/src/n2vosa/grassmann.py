"""Exact arithmetic in a finite Grassmann algebra over the ring Q[i, sqrt 2].

Scalars are stored as four integers over a common positive denominator,
representing ``a + b*r2 + c*i + d*i*r2``.  Grassmann monomials are stored
as bitmasks over the generators (bit ``j - 1`` for generator ``t_j``), which
is a canonical encoding of ascending generator subsets.  The Koszul sign
for a product of two monomials is computed by :func:`merge_sign`, the one
normalization routine shared with the series module.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Dict, Iterable, Iterator, Optional, Tuple, Union

from ._exprparse import ExpressionParser, ParseError

Number = Union[int, Fraction]

MAX_GENERATORS = 8


# ---------------------------------------------------------------------------
# Signs


@lru_cache(maxsize=1 << 16)
def merge_sign(left: int, right: int) -> int:
    """Sign of reordering the product of two ascending monomials.

    Returns 0 if the monomials share a generator, otherwise +1 or -1
    according to the number of inversions between ``left`` and ``right``.
    """
    if left & right:
        return 0
    inversions = 0
    rest = right
    while rest:
        low = rest & -rest
        inversions += bin(left & ~((low << 1) - 1)).count("1")
        rest ^= low
    return -1 if inversions & 1 else 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_to_subset(mask: int) -> Tuple[int, ...]:
    """Bitmask to ascending 1-based generator indices."""
    result = []
    index = 1
    while mask:
        if mask & 1:
            result.append(index)
        mask >>= 1
        index += 1
    return tuple(result)


def subset_to_mask(subset: Iterable[int]) -> Tuple[int, int]:
    """Ordered generator indices to (mask, sign); sign 0 on repetition."""
    mask = 0
    sign = 1
    for index in subset:
        bit = 1 << (index - 1)
        if mask & bit:
            return 0, 0
        # moving the new generator left past larger ones already present
        if popcount(mask & ~((bit << 1) - 1)) & 1:
            sign = -sign
        mask |= bit
    return mask, sign


# ---------------------------------------------------------------------------
# Scalars


def _rational_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    root_num, root_den = isqrt(num), isqrt(den)
    if root_num * root_num == num and root_den * root_den == den:
        return Fraction(root_num, root_den)
    return None


class Scalar:
    """Element ``a + b*sqrt2 + c*i + d*i*sqrt2`` with exact rational parts."""

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, a: Number = 0, b: Number = 0, c: Number = 0, d: Number = 0):
        parts = [Fraction(a), Fraction(b), Fraction(c), Fraction(d)]
        den = 1
        for part in parts:
            den = den * part.denominator // gcd(den, part.denominator)
        self._set(tuple(int(part * den) for part in parts), den)

    def _set(self, num: Tuple[int, int, int, int], den: int) -> None:
        common = gcd(gcd(gcd(num[0], num[1]), gcd(num[2], num[3])), den)
        if common > 1:
            num = tuple(value // common for value in num)
            den //= common
        if not any(num):
            den = 1
        self._num = num
        self._den = den
        self._hash = None

    @classmethod
    def _raw(cls, num: Tuple[int, int, int, int], den: int) -> "Scalar":
        obj = cls.__new__(cls)
        if den < 0:
            num = tuple(-value for value in num)
            den = -den
        obj._set(num, den)
        return obj

    # constructors -----------------------------------------------------------

    @classmethod
    def coerce(cls, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to Scalar")

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        value = GrassmannElement.parse(text, 0)
        return value.body()

    # accessors ----------------------------------------------------------------

    @property
    def parts(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return tuple(Fraction(value, self._den) for value in self._num)

    @property
    def a(self) -> Fraction:
        return Fraction(self._num[0], self._den)

    @property
    def b(self) -> Fraction:
        return Fraction(self._num[1], self._den)

    @property
    def c(self) -> Fraction:
        return Fraction(self._num[2], self._den)

    @property
    def d(self) -> Fraction:
        return Fraction(self._num[3], self._den)

    def is_zero(self) -> bool:
        return not any(self._num)

    def __bool__(self) -> bool:
        return any(self._num)

    def is_rational(self) -> bool:
        return not (self._num[1] or self._num[2] or self._num[3])

    def sign(self) -> int:
        """Sign of the first nonzero component in the order (a, b, c, d)."""
        for value in self._num:
            if value:
                return 1 if value > 0 else -1
        return 0

    # arithmetic -----------------------------------------------------------

    def __add__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        n1, d1, n2, d2 = self._num, self._den, other._num, other._den
        if d1 == d2:
            return Scalar._raw(tuple(x + y for x, y in zip(n1, n2)), d1)
        return Scalar._raw(tuple(x * d2 + y * d1 for x, y in zip(n1, n2)), d1 * d2)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._raw(tuple(-x for x in self._num), self._den)

    def __sub__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        return (-self) + other

    def __mul__(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                return Scalar._raw(tuple(x * other for x in self._num), self._den)
            if isinstance(other, Fraction):
                return Scalar._raw(
                    tuple(x * other.numerator for x in self._num),
                    self._den * other.denominator,
                )
            return NotImplemented
        a1, b1, c1, d1 = self._num
        a2, b2, c2, d2 = other._num
        num = (
            a1 * a2 + 2 * b1 * b2 - c1 * c2 - 2 * d1 * d2,
            a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2,
            a1 * c2 + c1 * a2 + 2 * b1 * d2 + 2 * d1 * b2,
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )
        return Scalar._raw(num, self._den * other._den)

    __rmul__ = __mul__

    def conjugate_i(self) -> "Scalar":
        """Complex conjugation i -> -i."""
        a, b, c, d = self._num
        return Scalar._raw((a, b, -c, -d), self._den)

    def conjugate_r2(self) -> "Scalar":
        """Galois conjugation sqrt2 -> -sqrt2."""
        a, b, c, d = self._num
        return Scalar._raw((a, -b, c, -d), self._den)

    def norm(self) -> Fraction:
        """Product of the four Galois conjugates, a rational number."""
        half = self * self.conjugate_i()
        full = half * half.conjugate_r2()
        return full.a

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("zero scalar is not invertible")
        # z^-1 = conj_i(z) conj_r2(N) / rational, N = z conj_i(z) in Q(sqrt2)
        half = self * self.conjugate_i()
        partner = half.conjugate_r2()
        rational = (half * partner).a
        return self.conjugate_i() * partner * (1 / rational)

    def __truediv__(self, other) -> "Scalar":
        return self * Scalar.coerce(other).inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "Scalar":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Scalar(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def sqrt(self) -> Optional["Scalar"]:
        """An exact square root inside Q[i, sqrt2], or None if none exists."""
        if self.is_zero():
            return Scalar(0)
        p = Scalar(self.a, self.b)
        q = Scalar(self.c, self.d)
        for norm_root in _sqrt_q2_all(p * p + q * q):
            for candidate in (norm_root, -norm_root):
                u_squared = (p + candidate) * Fraction(1, 2)
                for u in _sqrt_q2_all(u_squared):
                    if u.is_zero():
                        for v in _sqrt_q2_all(-p):
                            root = u + v * I
                            if root * root == self:
                                return _canonical_sign(root)
                        continue
                    v = q * (u * 2).inverse()
                    root = u + v * I
                    if root * root == self:
                        return _canonical_sign(root)
        return None

    # comparison and display -------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self._num == other._num and self._den == other._den
        if isinstance(other, (int, Fraction)):
            return self == Scalar(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._num, self._den))
        return self._hash

    def sort_key(self) -> Tuple[Fraction, ...]:
        return self.parts

    def __str__(self) -> str:
        names = ("", "r2", "i", "i*r2")
        pieces = []
        for part, name in zip(self.parts, names):
            if part == 0:
                continue
            magnitude = abs(part)
            if name == "":
                body = str(magnitude)
            elif magnitude == 1:
                body = name
            else:
                body = f"{magnitude}*{name}"
            pieces.append(("-" if part < 0 else "+", body))
        if not pieces:
            return "0"
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"

    def term_count(self) -> int:
        return sum(1 for value in self._num if value)


def _canonical_sign(value: Scalar) -> Scalar:
    return -value if value.sign() < 0 else value


def _sqrt_q2_all(value: Scalar) -> Iterator[Scalar]:
    """All square roots of an element of Q(sqrt2) that lie in Q(sqrt2)."""
    if value.c or value.d:
        return
    r0, r1 = value.a, value.b
    if r0 == 0 and r1 == 0:
        yield Scalar(0)
        return
    found = []
    discriminant = _rational_sqrt(r0 * r0 - 2 * r1 * r1)
    if discriminant is not None:
        for sign in (1, -1):
            u_squared = (r0 + sign * discriminant) / 2
            u = _rational_sqrt(u_squared)
            if u is None:
                continue
            for u_signed in (u, -u):
                if u_signed == 0:
                    v = _rational_sqrt(r0 / 2)
                    candidates = [] if v is None else [Scalar(0, v)]
                else:
                    candidates = [Scalar(u_signed, r1 / (2 * u_signed))]
                for candidate in candidates:
                    if candidate * candidate == value and candidate not in found:
                        found.append(candidate)
    for root in found:
        yield root


I = Scalar(0, 0, 1, 0)
R2 = Scalar(0, 1, 0, 0)
ONE = Scalar(1)
ZERO = Scalar(0)


# ---------------------------------------------------------------------------
# Grassmann elements


ScalarLike = Union[Scalar, int, Fraction]


def _check_generator_count(generator_count: int) -> None:
    if not 0 <= generator_count <= MAX_GENERATORS:
        raise ValueError(f"generator count must lie in 0..{MAX_GENERATORS}")


class GrassmannElement:
    """Finite linear combination of monomials in ``generator_count`` odd generators."""

    __slots__ = ("generator_count", "_terms", "_hash")

    def __init__(self, generator_count: int, terms: Optional[Dict] = None):
        _check_generator_count(generator_count)
        self.generator_count = generator_count
        self._hash = None
        cleaned: Dict[int, Scalar] = {}
        limit = 1 << generator_count
        for key, coeff in (terms or {}).items():
            if isinstance(key, int):
                mask, sign = key, 1
            else:
                mask, sign = subset_to_mask(key)
            if sign == 0:
                continue
            if mask >= limit:
                raise ValueError("generator index exceeds generator count")
            coeff = Scalar.coerce(coeff) * sign
            total = cleaned.get(mask, ZERO) + coeff
            if total.is_zero():
                cleaned.pop(mask, None)
            else:
                cleaned[mask] = total
        self._terms = cleaned

    @classmethod
    def _from_masks(cls, generator_count: int, terms: Dict[int, Scalar]) -> "GrassmannElement":
        obj = cls.__new__(cls)
        obj.generator_count = generator_count
        obj._hash = None
        obj._terms = terms
        return obj

    # constructors -----------------------------------------------------------

    @classmethod
    def scalar(cls, generator_count: int, value: ScalarLike) -> "GrassmannElement":
        _check_generator_count(generator_count)
        value = Scalar.coerce(value)
        return cls._from_masks(generator_count, {} if value.is_zero() else {0: value})

    @classmethod
    def generator(cls, generator_count: int, index: int) -> "GrassmannElement":
        if not 1 <= index <= generator_count:
            raise ValueError("generator index out of range")
        return cls._from_masks(generator_count, {1 << (index - 1): ONE})

    @classmethod
    def zero(cls, generator_count: int) -> "GrassmannElement":
        _check_generator_count(generator_count)
        return cls._from_masks(generator_count, {})

    @classmethod
    def one(cls, generator_count: int) -> "GrassmannElement":
        _check_generator_count(generator_count)
        return cls._from_masks(generator_count, {0: ONE})

    @classmethod
    def parse(cls, text: str, generator_count: int) -> "GrassmannElement":
        """Parse the ``coef * t1t3 + ...`` grammar with scalar literals r2 and i."""

        def atom(name: str) -> GrassmannElement:
            if name == "r2":
                return cls.scalar(generator_count, R2)
            if name == "i":
                return cls.scalar(generator_count, I)
            if name.startswith("t") and len(name) > 1:
                pieces = name[1:].split("t")
                try:
                    indices = [int(piece) for piece in pieces]
                except ValueError as exc:
                    raise ParseError(f"bad generator monomial {name!r}") from exc
                if any(index < 1 or index > generator_count for index in indices):
                    raise ParseError(f"generator out of range in {name!r}")
                return cls(generator_count, {tuple(indices): ONE})
            raise ParseError(f"unknown symbol {name!r}")

        def number(value: Fraction) -> GrassmannElement:
            return cls.scalar(generator_count, value)

        return ExpressionParser(atom, number).parse(text)

    # accessors ----------------------------------------------------------------

    @property
    def terms(self) -> Dict[Tuple[int, ...], Scalar]:
        """Mapping from ascending generator subsets to coefficients."""
        return {mask_to_subset(mask): coeff for mask, coeff in self._terms.items()}

    def mask_terms(self) -> Dict[int, Scalar]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def body(self) -> Scalar:
        return self._terms.get(0, ZERO)

    def soul(self) -> "GrassmannElement":
        return GrassmannElement._from_masks(
            self.generator_count, {m: c for m, c in self._terms.items() if m}
        )

    def parity(self) -> Optional[int]:
        """0 or 1 for homogeneous elements, None when mixed; zero counts as even."""
        parities = {popcount(mask) & 1 for mask in self._terms}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def even_part(self) -> "GrassmannElement":
        return GrassmannElement._from_masks(
            self.generator_count,
            {m: c for m, c in self._terms.items() if not popcount(m) & 1},
        )

    def odd_part(self) -> "GrassmannElement":
        return GrassmannElement._from_masks(
            self.generator_count,
            {m: c for m, c in self._terms.items() if popcount(m) & 1},
        )

    def is_scalar(self) -> bool:
        return all(mask == 0 for mask in self._terms)

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            if other.generator_count != self.generator_count:
                raise ValueError(
                    "mismatched generator counts "
                    f"{self.generator_count} and {other.generator_count}"
                )
            return other
        if isinstance(other, (Scalar, int, Fraction)):
            return GrassmannElement.scalar(self.generator_count, other)
        raise TypeError(f"cannot combine GrassmannElement with {type(other).__name__}")

    def __add__(self, other) -> "GrassmannElement":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self._terms)
        for mask, coeff in other._terms.items():
            total = terms.get(mask)
            total = coeff if total is None else total + coeff
            if total.is_zero():
                terms.pop(mask, None)
            else:
                terms[mask] = total
        return GrassmannElement._from_masks(self.generator_count, terms)

    __radd__ = __add__

    def __neg__(self) -> "GrassmannElement":
        return GrassmannElement._from_masks(
            self.generator_count, {m: -c for m, c in self._terms.items()}
        )

    def __sub__(self, other) -> "GrassmannElement":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "GrassmannElement":
        return (-self) + other

    def scale(self, factor: ScalarLike) -> "GrassmannElement":
        factor = Scalar.coerce(factor)
        if factor.is_zero():
            return GrassmannElement.zero(self.generator_count)
        return GrassmannElement._from_masks(
            self.generator_count, {m: c * factor for m, c in self._terms.items()}
        )

    def __mul__(self, other) -> "GrassmannElement":
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return gr_mul(self, other)

    def __rmul__(self, other) -> "GrassmannElement":
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, exponent: int) -> "GrassmannElement":
        if exponent < 0:
            return gr_inverse(self) ** (-exponent)
        result = GrassmannElement.one(self.generator_count)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> "GrassmannElement":
        return gr_inverse(self)

    def __truediv__(self, other) -> "GrassmannElement":
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(Scalar.coerce(other).inverse())
        return self * gr_inverse(self._coerce(other))

    def sqrt(self) -> "GrassmannElement":
        """Square root of an even element with a square body, canonical sign."""
        if self.parity() not in (0,):
            raise ValueError("square root needs an even element")
        body, soul = body_soul(self)
        root = body.sqrt()
        if root is None or root.is_zero():
            raise ValueError(f"body {body} has no exact invertible square root")
        ratio = soul.scale(body.inverse())
        # binomial series of (1 + ratio)^(1/2), finite since ratio is nilpotent
        result = GrassmannElement.one(self.generator_count)
        power = GrassmannElement.one(self.generator_count)
        coefficient = Fraction(1)
        k = 0
        while True:
            power = power * ratio
            if power.is_zero():
                break
            coefficient = coefficient * (Fraction(1, 2) - k) / (k + 1)
            k += 1
            result = result + power.scale(coefficient)
        return result.scale(root)

    # comparison and display -------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, GrassmannElement):
            return self._terms == other._terms
        if isinstance(other, (Scalar, int, Fraction)):
            other = Scalar.coerce(other)
            if other.is_zero():
                return not self._terms
            return self._terms == {0: other}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda item: (popcount(item[0]), mask_to_subset(item[0])))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for mask, coeff in self.sorted_items():
            coeff_text = str(coeff)
            if mask == 0:
                pieces.append(coeff_text if coeff.term_count() == 1 else f"({coeff_text})")
                continue
            monomial = "".join(f"t{index}" for index in mask_to_subset(mask))
            if coeff == ONE:
                pieces.append(monomial)
            elif coeff == -ONE:
                pieces.append(f"-{monomial}")
            elif coeff.term_count() == 1:
                pieces.append(f"{coeff_text} * {monomial}")
            else:
                pieces.append(f"({coeff_text}) * {monomial}")
        text = pieces[0]
        for piece in pieces[1:]:
            if piece.startswith("-"):
                text += f" - {piece[1:]}"
            else:
                text += f" + {piece}"
        return text

    def __repr__(self) -> str:
        return f"GrassmannElement({self.generator_count}, {str(self)!r})"


# ---------------------------------------------------------------------------
# Operations


def gr_mul(left: GrassmannElement, right: GrassmannElement) -> GrassmannElement:
    """Associative product with the Koszul sign from reordering generators."""
    if left.generator_count != right.generator_count:
        raise ValueError("mismatched generator counts")
    terms: Dict[int, Scalar] = {}
    for mask1, coeff1 in left._terms.items():
        for mask2, coeff2 in right._terms.items():
            if mask1 & mask2:
                continue
            sign = merge_sign(mask1, mask2)
            product = coeff1 * coeff2
            if sign < 0:
                product = -product
            key = mask1 | mask2
            total = terms.get(key)
            total = product if total is None else total + product
            if total.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = total
    return GrassmannElement._from_masks(left.generator_count, terms)


def body_soul(element: GrassmannElement) -> Tuple[Scalar, GrassmannElement]:
    """Split into the scalar body and the nilpotent soul."""
    return element.body(), element.soul()


def gr_inverse(element: GrassmannElement) -> GrassmannElement:
    """Inverse by the finite geometric series in soul / body."""
    body, soul = body_soul(element)
    if body.is_zero():
        raise ZeroDivisionError("Grassmann element with zero body is not invertible")
    body_inverse = body.inverse()
    ratio = soul.scale(-body_inverse)
    result = GrassmannElement.one(element.generator_count)
    power = GrassmannElement.one(element.generator_count)
    while True:
        power = power * ratio
        if power.is_zero():
            break
        result = result + power
    return result.scale(body_inverse)


def to_grassmann(value, generator_count: int) -> GrassmannElement:
    """Coerce scalars, numbers and strings to a Grassmann element."""
    if isinstance(value, GrassmannElement):
        if value.generator_count != generator_count:
            raise ValueError("mismatched generator counts")
        return value
    if isinstance(value, str):
        return GrassmannElement.parse(value, generator_count)
    return GrassmannElement.scalar(generator_count, value)


# ---------------------------------------------------------------------------
# Seeded random elements and kernel checks


def random_element(rng, generator_count: int, parity: Optional[int] = None, invertible: bool = False, density: float = 0.5) -> GrassmannElement:
    """Random element with small Q(i, sqrt 2) coefficients drawn from ``rng`` (a ``random.Random``).

    ``parity`` restricts to even (0) or odd (1) monomials; ``invertible``
    forces a nonzero body (even or mixed parity only).
    """
    terms: Dict[int, Scalar] = {}
    for mask in range(1 << generator_count):
        if parity is not None and popcount(mask) % 2 != parity:
            continue
        if mask == 0 and invertible:
            value = Scalar(0)
            while value.is_zero():
                value = Scalar(rng.randint(-3, 3), rng.randint(-1, 1), rng.randint(-2, 2))
            terms[0] = value
            continue
        if rng.random() < density:
            terms[mask] = Scalar(rng.randint(-3, 3), rng.randint(-1, 1), rng.randint(-2, 2))
    return GrassmannElement._from_masks(generator_count, {m: c for m, c in terms.items() if not c.is_zero()})


def check_kernel(seed: int, generator_count: int, samples: int = 200) -> dict:
    """Inverse, supercommutativity and soul nilpotency on seeded random elements."""
    import random

    rng = random.Random(seed)
    one = GrassmannElement.one(generator_count)
    failures = []
    for index in range(samples):
        a = random_element(rng, generator_count, invertible=True)
        if a * gr_inverse(a) != one or gr_inverse(a) * a != one:
            failures.append(f"inverse fails for sample {index}")
        b = random_element(rng, generator_count)
        for left in (a.even_part(), a.odd_part()):
            for right in (b.even_part(), b.odd_part()):
                sign = -1 if left.parity() == 1 and right.parity() == 1 and left and right else 1
                if left * right != (right * left).scale(sign):
                    failures.append(f"supercommutativity fails for sample {index}")
        power = a.soul() ** (generator_count + 1) if generator_count else a.soul()
        if not power.is_zero():
            failures.append(f"soul of sample {index} is not nilpotent")
        linear = GrassmannElement._from_masks(generator_count, {1 << j: c for j, c in enumerate(a.mask_terms().get(1 << j, ZERO) for j in range(generator_count)) if not c.is_zero()})
        if not (linear * linear).is_zero():
            failures.append(f"square of the odd linear part of sample {index} is nonzero")
    return {"generator_count": generator_count, "seed": seed, "samples": samples, "failures": failures, "pass": not failures}
