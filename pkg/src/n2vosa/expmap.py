"""Exponentials of even superderivations, the maps hatE2/hatE1, extraction and group laws.

Weights: the monomial ``x^k phi^S`` has weight ``k + |S|/2`` at the zero locus
and ``-k - |S|/2`` at the infinity locus.  Internally weights are doubled so
that they are integers.  A coordinate map computed at truncation weight ``N``
keeps terms of weight at most ``N`` in the even component and at most
``N - 1/2`` in the odd components; infinitesimal data are then determined for
the indices ``n = 1 .. N - 1``.

Infinity maps are related to zero maps through ``I^{-1}(x, phi) = (1/x, -i phi/x)``:
``f`` lives at infinity exactly when ``f o I^{-1}`` lives at zero.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .grassmann import I, ONE, GrassmannElement, Scalar, popcount
from .linalg import solve_linear
from .superderiv import SuperDerivation, is_superconformal, make_rep
from .superseries import SuperSeries, VariableSpec
from ._kernel import Kernel, Poly, _finalize

FLAVORS = ("N2_homo", "N2_nonhomo", "N1")
LOCI = ("zero", "infinity")
TARGETS = ("E2_homo", "E2_nonhomo", "E1")
TARGET_FLAVOR = {"E2_homo": "N2_homo", "E2_nonhomo": "N2_nonhomo", "E1": "N1"}
FLAVOR_TARGET = {flavor: target for target, flavor in TARGET_FLAVOR.items()}
BASIS_FLAVOR = {"homo": "N2_homo", "nonhomo": "N2_nonhomo"}
LAWS = ("N2", "N1")

DEFAULT_WEIGHT = 6
MAX_WEIGHT = 8
DEFAULT_GENERATORS = 4
STORAGE_WINDOW = 64

# representation family and kinds (L, J, first G, second G) per flavor
_FLAVOR_FAMILY = {"N2_homo": "homo2", "N2_nonhomo": "nonhomo2", "N1": "n2_one_var"}
_FLAVOR_KINDS = {
    "N2_homo": ("L", "J", "Gplus", "Gminus"),
    "N2_nonhomo": ("L", "J", "G1", "G2"),
    "N1": ("L", "J", "G1", "G2"),
}
_SUPERCONFORMAL_FLAVOR = {"N2_homo": "homo2", "N2_nonhomo": "nonhomo2"}


class ExpMapError(ValueError):
    """Raised for invalid data, non weight raising derivations and inadmissible maps."""


def _check_choice(value: str, choices: Sequence[str], what: str) -> None:
    if value not in choices:
        raise ExpMapError(f"unknown {what} {value!r}; expected one of {', '.join(choices)}")


def _check_weight(weight: int) -> None:
    if not isinstance(weight, int) or weight < 2 or weight > MAX_WEIGHT:
        raise ExpMapError(f"truncation weight must be an integer in 2..{MAX_WEIGHT}, got {weight!r}")


@lru_cache(maxsize=None)
def flavor_spec(flavor: str) -> VariableSpec:
    """Variables of a flavor: ``x`` plus ``p, m`` (homo), ``f1, f2`` (nonhomo) or ``f`` (N1)."""
    _check_choice(flavor, FLAVORS, "flavor")
    odd = {"N2_homo": ("p", "m"), "N2_nonhomo": ("f1", "f2"), "N1": ("f",)}[flavor]
    return VariableSpec.make(("x",), odd, window=(-STORAGE_WINDOW, STORAGE_WINDOW))


# ---------------------------------------------------------------------------
# Weights and truncation


def double_weight(exps: Tuple[int, ...], odd_mask: int, locus: str) -> int:
    value = 2 * exps[0] + popcount(odd_mask)
    return value if locus == "zero" else -value


def truncate(series: SuperSeries, bound: int, locus: str) -> SuperSeries:
    """Drop terms of doubled weight above ``bound``."""
    return series.filter(lambda exps, mask: double_weight(exps, mask, locus) <= bound)


def weight_slice(series: SuperSeries, level: int, locus: str) -> SuperSeries:
    return series.filter(lambda exps, mask: double_weight(exps, mask, locus) == level)


def min_double_weight(series: SuperSeries, locus: str) -> Optional[int]:
    shift_mask = (1 << len(series.spec.odd_vars)) - 1
    values = [double_weight(exps, mask & shift_mask, locus) for exps, mask in series.raw_terms()]
    return min(values) if values else None


def leading_double_weights(flavor: str, locus: str) -> Tuple[int, ...]:
    """Doubled weight of each coordinate: 2 for the even one, 1 for odd ones (negated at infinity for raw coordinates)."""
    count = len(flavor_spec(flavor).odd_vars)
    return (2,) + (1,) * count


def component_bounds(flavor: str, weight: int) -> Tuple[int, ...]:
    """Doubled truncation bound of each component of a map at truncation weight ``weight``."""
    count = len(flavor_spec(flavor).odd_vars)
    return (2 * weight,) + (2 * weight - 1,) * count


# ---------------------------------------------------------------------------
# Data types


def _grassmann(value, generator_count: int) -> GrassmannElement:
    if isinstance(value, GrassmannElement):
        if value.generator_count != generator_count:
            raise ExpMapError("generator count mismatch in infinitesimal data")
        return value
    if isinstance(value, str):
        return GrassmannElement.parse(value, generator_count)
    return GrassmannElement.scalar(generator_count, value)


def _is_even(element: GrassmannElement) -> bool:
    return element.parity() in (0,) or element.is_zero()


def _is_odd(element: GrassmannElement) -> bool:
    return element.parity() in (1,) or element.is_zero()


@dataclass(frozen=True)
class CoordMap:
    """A coordinate map ``(x~, phi~ ...)`` given by its component series."""

    flavor: str
    components: Tuple[SuperSeries, ...]
    locus: str = "zero"
    weight: Optional[int] = None

    def __post_init__(self):
        _check_choice(self.flavor, FLAVORS, "flavor")
        _check_choice(self.locus, LOCI, "locus")
        spec = flavor_spec(self.flavor)
        components = tuple(self.components)
        if len(components) != 1 + len(spec.odd_vars):
            raise ExpMapError(f"flavor {self.flavor} needs {1 + len(spec.odd_vars)} components")
        for component in components:
            if not component.spec.same_names(spec):
                raise ExpMapError("component variables do not match the flavor")
        object.__setattr__(self, "components", components)

    @property
    def generator_count(self) -> int:
        return self.components[0].generator_count

    @classmethod
    def identity(cls, flavor: str, generator_count: int = DEFAULT_GENERATORS, weight: Optional[int] = None) -> "CoordMap":
        spec = flavor_spec(flavor)
        names = spec.even_names + spec.odd_vars
        return cls(flavor, tuple(SuperSeries.var(spec, generator_count, name) for name in names), "zero", weight)

    def truncated(self, weight: int) -> "CoordMap":
        bounds = component_bounds(self.flavor, weight)
        components = tuple(truncate(c, b, self.locus) for c, b in zip(self.components, bounds))
        return CoordMap(self.flavor, components, self.locus, weight)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoordMap):
            return NotImplemented
        return (
            self.flavor == other.flavor
            and self.locus == other.locus
            and all(a == b for a, b in zip(self.components, other.components))
        )

    def __hash__(self):
        return hash((self.flavor, self.locus))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"

    def to_json(self) -> dict:
        return {
            "flavor": self.flavor,
            "locus": self.locus,
            "weight": self.weight,
            "components": [c.to_json() for c in self.components],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CoordMap":
        flavor = data["flavor"]
        spec = flavor_spec(flavor)
        components = []
        for item in data["components"]:
            series = SuperSeries.from_json(item)
            if not series.spec.same_names(spec):
                raise ExpMapError("component variables do not match the flavor")
            components.append(series.reframe(spec))
        return cls(flavor, tuple(components), data.get("locus", "zero"), data.get("weight"))


@dataclass(frozen=True)
class InfinitesimalData:
    """``(a0_1, a0_2, A1, A2, M1, M2)`` with sequences indexed by ``n = 1 .. weight - 1``.

    The pair ``(a0_1, a0_2)`` is stored in the canonical representative of the
    quotient by ``(-1, -1)``: the body of ``a0_1`` has positive sign.
    """

    a0_1: GrassmannElement
    a0_2: GrassmannElement
    A1: Tuple[GrassmannElement, ...]
    A2: Tuple[GrassmannElement, ...]
    M1: Tuple[GrassmannElement, ...]
    M2: Tuple[GrassmannElement, ...]
    weight: int = DEFAULT_WEIGHT

    def __post_init__(self):
        _check_weight(self.weight)
        L = self.a0_1.generator_count if isinstance(self.a0_1, GrassmannElement) else DEFAULT_GENERATORS
        a1 = _grassmann(self.a0_1, L)
        a2 = _grassmann(self.a0_2, L)
        for name, value in (("a0_1", a1), ("a0_2", a2)):
            if not _is_even(value) or value.body().is_zero():
                raise ExpMapError(f"{name} must be an invertible even element, got {value}")
        length = self.weight - 1
        sequences = {}
        for name, check, kind in (("A1", _is_even, "even"), ("A2", _is_even, "even"), ("M1", _is_odd, "odd"), ("M2", _is_odd, "odd")):
            values = [_grassmann(v, L) for v in getattr(self, name)]
            for index, value in enumerate(values):
                if not check(value):
                    raise ExpMapError(f"{name}[{index + 1}] must be {kind}, got {value}")
                if index >= length and not value.is_zero():
                    raise ExpMapError(f"{name}[{index + 1}] is beyond the truncation weight {self.weight}")
            values = values[:length] + [GrassmannElement.zero(L)] * (length - len(values))
            sequences[name] = tuple(values)
        if a1.body().sign() < 0:
            a1, a2 = -a1, -a2
        object.__setattr__(self, "a0_1", a1)
        object.__setattr__(self, "a0_2", a2)
        for name, values in sequences.items():
            object.__setattr__(self, name, values)

    @property
    def generator_count(self) -> int:
        return self.a0_1.generator_count

    @classmethod
    def identity(cls, weight: int = DEFAULT_WEIGHT, generator_count: int = DEFAULT_GENERATORS) -> "InfinitesimalData":
        one = GrassmannElement.one(generator_count)
        return cls(one, one, (), (), (), (), weight)

    @classmethod
    def grading(cls, a, b, weight: int = DEFAULT_WEIGHT, generator_count: int = DEFAULT_GENERATORS) -> "InfinitesimalData":
        return cls(_grassmann(a, generator_count), _grassmann(b, generator_count), (), (), (), (), weight)

    def with_weight(self, weight: int) -> "InfinitesimalData":
        """Same data at another truncation weight (entries beyond it must vanish when shrinking)."""
        return InfinitesimalData(self.a0_1, self.a0_2, self.A1, self.A2, self.M1, self.M2, weight)

    def truncated(self, weight: int) -> "InfinitesimalData":
        """Data with the sequences cut to ``n <= weight - 1``."""
        cut = weight - 1
        return InfinitesimalData(self.a0_1, self.a0_2, self.A1[:cut], self.A2[:cut], self.M1[:cut], self.M2[:cut], weight)

    def twisted(self) -> "InfinitesimalData":
        """``(a0_1, a0_2, A1, -A2, -i M1, -i M2)``."""
        return InfinitesimalData(
            self.a0_1,
            self.a0_2,
            self.A1,
            tuple(-v for v in self.A2),
            tuple(v.scale(-I) for v in self.M1),
            tuple(v.scale(-I) for v in self.M2),
            self.weight,
        )

    def untwisted(self) -> "InfinitesimalData":
        """Inverse of :meth:`twisted`."""
        return InfinitesimalData(
            self.a0_1,
            self.a0_2,
            self.A1,
            tuple(-v for v in self.A2),
            tuple(v.scale(I) for v in self.M1),
            tuple(v.scale(I) for v in self.M2),
            self.weight,
        )

    def is_identity(self) -> bool:
        return self == InfinitesimalData.identity(self.weight, self.generator_count)

    def to_json(self) -> dict:
        return {
            "a0_1": str(self.a0_1),
            "a0_2": str(self.a0_2),
            "A1": [str(v) for v in self.A1],
            "A2": [str(v) for v in self.A2],
            "M1": [str(v) for v in self.M1],
            "M2": [str(v) for v in self.M2],
            "weight": self.weight,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict, generator_count: int = DEFAULT_GENERATORS) -> "InfinitesimalData":
        L = int(data.get("generator_count", generator_count))
        parse = lambda text: GrassmannElement.parse(str(text), L)  # noqa: E731
        weight = int(data.get("weight", DEFAULT_WEIGHT))
        return cls(
            parse(data["a0_1"]),
            parse(data["a0_2"]),
            tuple(parse(v) for v in data.get("A1", [])),
            tuple(parse(v) for v in data.get("A2", [])),
            tuple(parse(v) for v in data.get("M1", [])),
            tuple(parse(v) for v in data.get("M2", [])),
            weight,
        )


# ---------------------------------------------------------------------------
# Random data


def _random_element(rng: random.Random, generator_count: int, parity: int, with_body: bool, density: float) -> GrassmannElement:
    terms: Dict[int, Scalar] = {}
    for mask in range(1 << generator_count):
        if popcount(mask) % 2 != parity:
            continue
        if mask == 0:
            if with_body:
                value = 0
                while value == 0:
                    value = rng.randint(-3, 3)
                terms[0] = Scalar(value, 0, rng.randint(-1, 1))
            continue
        if rng.random() < density:
            terms[mask] = Scalar(rng.randint(-3, 3), 0, rng.randint(-2, 2))
    return GrassmannElement._from_masks(generator_count, {m: c for m, c in terms.items() if not c.is_zero()})


def random_infinitesimal_data(
    seed: int,
    weight: int = DEFAULT_WEIGHT,
    generator_count: int = DEFAULT_GENERATORS,
    density: float = 0.5,
) -> InfinitesimalData:
    """Seeded data with soul-bearing coefficients in every slot."""
    rng = random.Random(seed)
    a1 = _random_element(rng, generator_count, 0, True, density)
    a2 = _random_element(rng, generator_count, 0, True, density)
    length = weight - 1
    A1 = tuple(_random_element(rng, generator_count, 0, rng.random() < 0.8, density) for _ in range(length))
    A2 = tuple(_random_element(rng, generator_count, 0, rng.random() < 0.8, density) for _ in range(length))
    M1 = tuple(_random_element(rng, generator_count, 1, False, density) for _ in range(length))
    M2 = tuple(_random_element(rng, generator_count, 1, False, density) for _ in range(length))
    return InfinitesimalData(a1, a2, A1, A2, M1, M2, weight)


# ---------------------------------------------------------------------------
# Derivations and grading


def _constant(spec: VariableSpec, generator_count: int, value: GrassmannElement) -> SuperSeries:
    return SuperSeries.constant(spec, generator_count, value)


def infinitesimal_derivation(g: InfinitesimalData, flavor: str, locus: str) -> SuperDerivation:
    """The even derivation in the exponent of hatE.

    Zero: ``-sum (A1_n L_n + A2_n J_n + M1_n G1_(n-1/2) + M2_n G2_(n-1/2))``.
    Infinity: ``sum (A1_n L_-n - A2_n J_-n + i M1_n G1_(-n+1/2) + i M2_n G2_(-n+1/2))``.
    """
    _check_choice(flavor, FLAVORS, "flavor")
    _check_choice(locus, LOCI, "locus")
    spec = flavor_spec(flavor)
    L = g.generator_count
    family = _FLAVOR_FAMILY[flavor]
    kind_l, kind_j, kind_g1, kind_g2 = _FLAVOR_KINDS[flavor]
    total = SuperDerivation(spec, L)

    def rep(kind: str, index: int) -> SuperDerivation:
        return make_rep(family, kind, index, generator_count=L, spec=spec)

    for n in range(1, g.weight):
        a1, a2, m1, m2 = g.A1[n - 1], g.A2[n - 1], g.M1[n - 1], g.M2[n - 1]
        if locus == "zero":
            pieces = ((a1, rep(kind_l, n)), (a2, rep(kind_j, n)), (m1, rep(kind_g1, n)), (m2, rep(kind_g2, n)))
            for coeff, derivation in pieces:
                if not coeff.is_zero():
                    total = total - derivation.scale(coeff)
        else:
            pieces = (
                (a1, rep(kind_l, -n)),
                (-a2, rep(kind_j, -n)),
                (m1.scale(I), rep(kind_g1, -n + 1)),
                (m2.scale(I), rep(kind_g2, -n + 1)),
            )
            for coeff, derivation in pieces:
                if not coeff.is_zero():
                    total = total + derivation.scale(coeff)
    return total


@lru_cache(maxsize=None)
def _kernel(flavor: str, locus: str) -> Kernel:
    return Kernel(len(flavor_spec(flavor).odd_vars), locus)


def _variable_index(spec: VariableSpec, name: str) -> int:
    """Kernel variable index: ``-1`` for the even coordinate, the odd index otherwise."""
    return -1 if name in spec.even_names else spec.odd_index(name)


@lru_cache(maxsize=None)
def _pattern(flavor: str, kind: str, index: int) -> Tuple[Tuple[int, Poly], ...]:
    """Scalar coefficients of one basis derivation as kernel polynomials."""
    spec = flavor_spec(flavor)
    rep = make_rep(_FLAVOR_FAMILY[flavor], kind, index, generator_count=1, spec=spec)
    return tuple((_variable_index(spec, name), Kernel.from_series(coeff)) for coeff, name in rep.terms)


def _derivation_pieces(g: InfinitesimalData, flavor: str, locus: str) -> List[Tuple[GrassmannElement, str, int]]:
    kind_l, kind_j, kind_g1, kind_g2 = _FLAVOR_KINDS[flavor]
    pieces = []
    for n in range(1, g.weight):
        a1, a2, m1, m2 = g.A1[n - 1], g.A2[n - 1], g.M1[n - 1], g.M2[n - 1]
        if locus == "zero":
            pieces += [(-a1, kind_l, n), (-a2, kind_j, n), (-m1, kind_g1, n), (-m2, kind_g2, n)]
        else:
            pieces += [(a1, kind_l, -n), (-a2, kind_j, -n), (m1.scale(I), kind_g1, -n + 1), (m2.scale(I), kind_g2, -n + 1)]
    return [piece for piece in pieces if not piece[0].is_zero()]


def _derivation_terms(g: InfinitesimalData, flavor: str, locus: str) -> List[Tuple[int, Poly]]:
    """The exponent derivation of hatE as kernel terms ``(variable, coefficient)``."""
    kernel = _kernel(flavor, locus)
    accumulators: Dict[int, Dict] = {}
    for coeff, kind, index in _derivation_pieces(g, flavor, locus):
        constant = kernel.constant(coeff)
        for variable, poly in _pattern(flavor, kind, index):
            kernel.mul_into(accumulators.setdefault(variable, {}), constant, poly, None)
    terms = [(variable, _finalize(accumulator)) for variable, accumulator in sorted(accumulators.items())]
    return [(variable, poly) for variable, poly in terms if poly]


def _series_terms(T: SuperDerivation) -> List[Tuple[int, Poly]]:
    return [(_variable_index(T.spec, name), Kernel.from_series(coeff)) for coeff, name in T.terms]


def _to_series(poly: Poly, flavor: str, generator_count: int) -> SuperSeries:
    return Kernel.to_series(poly, flavor_spec(flavor), generator_count)


def grading_images(flavor: str, locus: str, a: GrassmannElement, b: GrassmannElement) -> Dict[str, SuperSeries]:
    """Images of the coordinates under ``a^(-2L0) b^(-J0)`` (zero) or ``a^(2L0) b^(-J0)`` (infinity).

    Both are algebra automorphisms fixed by their (diagonalizable) action on
    the coordinates, so they are applied in closed form.
    """
    spec = flavor_spec(flavor)
    L = a.generator_count
    scale = a if locus == "zero" else a.inverse()
    b_inv = b.inverse()
    const = lambda value: _constant(spec, L, value)  # noqa: E731
    var = lambda name: SuperSeries.var(spec, L, name)  # noqa: E731
    images = {"x": var("x") * const(scale * scale)}
    if flavor == "N2_homo":
        images["p"] = var("p") * const(scale * b)
        images["m"] = var("m") * const(scale * b_inv)
    elif flavor == "N2_nonhomo":
        # b^(-J0) with -J0 = -i(f1 d/df2 - f2 d/df1): eigenvalue +1 on f1 + i f2, -1 on f1 - i f2
        cosh = (b + b_inv).scale(Fraction(1, 2))
        sinh = (b - b_inv).scale(Fraction(1, 2))
        images["f1"] = var("f1") * const(scale * cosh) + var("f2") * const(scale * sinh.scale(I))
        images["f2"] = var("f1") * const(scale * sinh.scale(-I)) + var("f2") * const(scale * cosh)
    else:
        # J0 = phi d/dphi
        images["f"] = var("f") * const(scale * b_inv)
    return images


def _grading_inverse_images(flavor: str, a: GrassmannElement, b: GrassmannElement) -> Dict[str, SuperSeries]:
    """Zero-locus grading for ``(a^-1, b^-1)``, the inverse linear map."""
    return grading_images(flavor, "zero", a.inverse(), b.inverse())


def _monomial_images_power(image: SuperSeries, exponent: int) -> SuperSeries:
    """Power of a monomial image ``c x^e phi^S`` for any integer exponent (``S`` empty when negative)."""
    terms = image.coefficients()
    if len(terms) != 1:
        raise ExpMapError("closed-form grading needs monomial images for the even coordinate")
    ((exps, names), coeff), = terms.items()
    if names and exponent != 1:
        raise ExpMapError("odd monomial images cannot be raised to powers")
    spec = image.spec
    L = image.generator_count
    power = coeff ** exponent if exponent >= 0 else coeff.inverse() ** (-exponent)
    return SuperSeries.monomial(spec, L, {"x": exps[0] * exponent}, names, power)


def substitute_linear(series: SuperSeries, images: Dict[str, SuperSeries]) -> SuperSeries:
    """Substitute coordinates by images that are monomial in ``x`` and linear in the odd variables.

    Works for any integer powers of ``x``, so it applies to Laurent series.
    """
    spec = series.spec
    L = series.generator_count
    odd_names = spec.odd_vars
    result = SuperSeries.zero(spec, L)
    x_cache: Dict[int, SuperSeries] = {}
    odd_cache: Dict[Tuple[str, ...], SuperSeries] = {}
    for (exps, names), coeff in series.coefficients().items():
        if names not in odd_cache:
            product = SuperSeries.one(spec, L)
            for name in names:
                product = product * images.get(name, SuperSeries.var(spec, L, name))
            odd_cache[names] = product
        k = exps[0]
        if k not in x_cache:
            x_cache[k] = _monomial_images_power(images.get("x", SuperSeries.var(spec, L, "x")), k)
        result = result + odd_cache[names] * x_cache[k] * _constant(spec, L, coeff)
    return result


# ---------------------------------------------------------------------------
# Exponentials


def is_weight_raising(T: SuperDerivation, locus: str) -> bool:
    """Whether every term of ``T`` strictly raises the locus weight."""
    spec = T.spec
    for coeff, name in T.terms:
        if name in spec.odd_vars:
            target = 1 if locus == "zero" else -1
        else:
            target = 2 if locus == "zero" else -2
        low = min_double_weight(coeff, locus)
        if low is not None and low - target <= 0:
            return False
    return True


_UNBOUNDED = 1 << 30
_NILPOTENT_STEPS = 64


def exp_series(T: SuperDerivation, series: SuperSeries, bound: int, locus: str = "zero") -> SuperSeries:
    """``exp(T)`` applied to one series, keeping terms of doubled weight at most ``bound``."""
    if len(series.spec.even_names) != 1:
        raise ExpMapError("exp_series works with one even coordinate")
    kernel = Kernel(series.odd_count, locus)
    if is_weight_raising(T, locus):
        result = kernel.exp(_series_terms(T), Kernel.from_series(series), bound)
        return Kernel.to_series(result, series.spec, series.generator_count)
    # other derivations only work when T is nilpotent on the series (e.g. Grassmann coefficients)
    try:
        result = kernel.exp(_series_terms(T), Kernel.from_series(series), _UNBOUNDED, max_steps=_NILPOTENT_STEPS)
    except ValueError:
        raise ExpMapError(
            "the derivation neither raises the weight nor is nilpotent on the series; apply grading operators in closed form"
        ) from None
    return Kernel.to_series(kernel.truncate(result, bound), series.spec, series.generator_count)


def exp_apply(
    T: SuperDerivation,
    target: Union[CoordMap, Sequence[SuperSeries]],
    weight: int,
    locus: Optional[str] = None,
    bounds: Optional[Sequence[int]] = None,
) -> Union[CoordMap, Tuple[SuperSeries, ...]]:
    """``exp(T)`` applied to each component, truncated at total weight ``weight``.

    For a :class:`CoordMap` the per-component bounds follow the map's flavor;
    for a plain sequence every component is cut at weight ``weight`` unless
    ``bounds`` (doubled weights) is given.
    """
    if isinstance(target, CoordMap):
        locus = locus or target.locus
        bounds = bounds or component_bounds(target.flavor, weight)
        components = tuple(exp_series(T, c, b, locus) for c, b in zip(target.components, bounds))
        return CoordMap(target.flavor, components, target.locus, weight)
    locus = locus or "zero"
    components = tuple(target)
    bounds = bounds or (2 * weight,) * len(components)
    return tuple(exp_series(T, c, b, locus) for c, b in zip(components, bounds))


def inversion_map(series: SuperSeries, inverse: bool = False) -> SuperSeries:
    """Composition with ``I(x, phi) = (1/x, i phi/x)`` or, with ``inverse``, ``I^{-1} = (1/x, -i phi/x)``."""
    spec = series.spec
    L = series.generator_count
    unit = -I if inverse else I
    result = SuperSeries.zero(spec, L)
    for (exps, names), coeff in series.coefficients().items():
        factor = unit ** len(names)
        result = result + SuperSeries.monomial(spec, L, {"x": -exps[0] - len(names)}, names, coeff.scale(factor))
    return result


def to_zero_locus(f: CoordMap) -> CoordMap:
    """``f o I^{-1}`` for an infinity map, a map at the zero locus."""
    if f.locus != "infinity":
        raise ExpMapError("to_zero_locus needs an infinity-locus map")
    return CoordMap(f.flavor, tuple(inversion_map(c, inverse=True) for c in f.components), "zero", f.weight)


def to_infinity_locus(f: CoordMap) -> CoordMap:
    """``f o I`` for a zero-locus map."""
    if f.locus != "zero":
        raise ExpMapError("to_infinity_locus needs a zero-locus map")
    return CoordMap(f.flavor, tuple(inversion_map(c) for c in f.components), "infinity", f.weight)


def _base_coordinates(flavor: str, locus: str, generator_count: int) -> Tuple[SuperSeries, ...]:
    identity = CoordMap.identity(flavor, generator_count)
    if locus == "zero":
        return identity.components
    return tuple(inversion_map(c) for c in identity.components)


def hat_e(g: InfinitesimalData, flavor: str, locus: str = "zero", weight: Optional[int] = None) -> CoordMap:
    """``exp(T) . grading . base`` with base ``(x, phi)`` at zero and ``I(x, phi)`` at infinity."""
    _check_choice(flavor, FLAVORS, "flavor")
    _check_choice(locus, LOCI, "locus")
    weight = weight or g.weight
    _check_weight(weight)
    if weight < g.weight:
        g = g.truncated(weight)
    return _hat_e(g, flavor, locus, weight)


def _hat_e_polys(g: InfinitesimalData, flavor: str, locus: str, weight: int) -> List[Poly]:
    kernel = _kernel(flavor, locus)
    images = grading_images(flavor, locus, g.a0_1, g.a0_2)
    graded = [Kernel.from_series(substitute_linear(c, images)) for c in _base_coordinates(flavor, locus, g.generator_count)]
    T = _derivation_terms(g, flavor, locus)
    bounds = component_bounds(flavor, weight)
    return [kernel.exp(T, c, b) for c, b in zip(graded, bounds)]


def _hat_e(g: InfinitesimalData, flavor: str, locus: str, weight: int) -> CoordMap:
    L = g.generator_count
    components = tuple(_to_series(p, flavor, L) for p in _hat_e_polys(g, flavor, locus, weight))
    return CoordMap(flavor, components, locus, weight)


def hatE2(g: InfinitesimalData, basis: str = "nonhomo", locus: str = "zero", weight: Optional[int] = None) -> CoordMap:
    """N=2 superconformal map of ``g`` in the homogeneous or nonhomogeneous coordinates."""
    _check_choice(basis, tuple(BASIS_FLAVOR), "basis")
    return hat_e(g, BASIS_FLAVOR[basis], locus, weight)


def hatE1(g: InfinitesimalData, locus: str = "zero", weight: Optional[int] = None) -> CoordMap:
    """N=1 superanalytic map of ``g`` built from the one-odd-variable derivations."""
    return hat_e(g, "N1", locus, weight)


# ---------------------------------------------------------------------------
# Composition


def _split_grassmann(poly: Poly, odd_count: int) -> Dict[Tuple[int, int], Poly]:
    """Group terms by (x exponent, formal odd mask); values are Grassmann constants."""
    low = (1 << odd_count) - 1
    groups: Dict[Tuple[int, int], Poly] = {}
    for (k, mask), value in poly.items():
        groups.setdefault((k, mask & low), {})[(0, mask & ~low)] = value
    return groups


def _compose_polys(flavor: str, outer: Sequence[Poly], inner: Sequence[Poly], bounds: Sequence[int]) -> List[Poly]:
    """``outer o inner`` at the zero locus, component ``i`` kept to doubled weight ``bounds[i]``."""
    kernel = _kernel(flavor, "zero")
    odd_count = kernel.odd_count
    top = max(bounds)
    x_image = inner[0]
    odd_images = list(inner[1:])
    powers: Dict[int, Poly] = {0: {(0, 0): ((1, 0, 0, 0), 1)}}
    odd_products: Dict[int, Poly] = {0: {(0, 0): ((1, 0, 0, 0), 1)}}

    def x_power(k: int) -> Poly:
        if k < 0:
            raise ExpMapError("outer map has negative powers of x at the zero locus")
        if k not in powers:
            powers[k] = kernel.mul(x_power(k - 1), x_image, top)
        return powers[k]

    def odd_product(mask: int) -> Poly:
        if mask not in odd_products:
            highest = mask.bit_length() - 1
            odd_products[mask] = kernel.mul(odd_product(mask & ~(1 << highest)), odd_images[highest], top)
        return odd_products[mask]

    result = []
    for component, bound in zip(outer, bounds):
        accumulator: Dict = {}
        for (k, formal), constant in _split_grassmann(component, odd_count).items():
            if 2 * k + popcount(formal) > bound:
                continue
            piece = kernel.mul(odd_product(formal), x_power(k), bound)
            if piece:
                kernel.mul_into(accumulator, piece, constant, bound)
        result.append(_finalize(accumulator))
    return result


def compose_maps(outer: CoordMap, inner: CoordMap, weight: Optional[int] = None) -> CoordMap:
    """``outer o inner`` for zero-locus maps, truncated at ``weight``.

    Every component of ``inner`` has positive weight, so truncating the
    intermediate products is exact.
    """
    if outer.flavor != inner.flavor:
        raise ExpMapError("composition needs maps of the same flavor")
    if outer.locus != "zero" or inner.locus != "zero":
        raise ExpMapError("compose_maps works at the zero locus; use to_zero_locus first")
    weight = weight or min(w for w in (outer.weight, inner.weight, MAX_WEIGHT) if w is not None)
    for component in inner.components:
        low = min_double_weight(component, "zero")
        if low is not None and low < 1:
            raise ExpMapError("inner map does not vanish at the origin")
    flavor = outer.flavor
    bounds = component_bounds(flavor, weight)
    outer_polys = [Kernel.from_series(c) for c in outer.components]
    inner_polys = [Kernel.from_series(c) for c in inner.components]
    polys = _compose_polys(flavor, outer_polys, inner_polys, bounds)
    L = outer.generator_count
    return CoordMap(flavor, tuple(_to_series(p, flavor, L) for p in polys), "zero", weight)


# ---------------------------------------------------------------------------
# Extraction


class ExtractionError(ExpMapError):
    """The map is not in the admissible shape for the requested target."""


def _leading_coefficient(series: SuperSeries, k: int, names: Tuple[str, ...]) -> GrassmannElement:
    return series.coefficient({"x": k}, names)


def _check_vanishing(f: CoordMap) -> None:
    names = ("x~",) + tuple(f"phi~{index + 1}" for index in range(len(f.components) - 1))
    for label, component, minimum in zip(names, f.components, leading_double_weights(f.flavor, "zero")):
        low = min_double_weight(component, "zero")
        if low is not None and low < minimum:
            raise ExtractionError(f"{label} has terms of weight below {Fraction(minimum, 2)} (map does not vanish at the origin)")


def restricted_shape_violation(f: CoordMap) -> Optional[str]:
    """First violated condition of ``x~ in x L0[[x]] + phi x L1[[x]]``, ``phi~ in x L1[[x]] + phi L0[[x]]``."""
    if f.flavor != "N1":
        return "restricted shape applies to the N1 flavor"
    x_new, phi_new = f.components if f.locus == "zero" else to_zero_locus(f).components
    for (exps, names), coeff in x_new.coefficients().items():
        if exps[0] < 1:
            return f"x~ has a term phi^{len(names)} x^{exps[0]} with exponent below 1"
        if not names and not _is_even(coeff):
            return "x~ has an odd coefficient on a pure power of x"
        if names and not _is_odd(coeff):
            return "x~ has an even coefficient on phi x^k"
    for (exps, names), coeff in phi_new.coefficients().items():
        if exps[0] < (1 if not names else 0):
            return f"phi~ has a term phi^{len(names)} x^{exps[0]} outside the shape"
        if not names and not _is_odd(coeff):
            return "phi~ has an even coefficient on a pure power of x"
        if names and not _is_even(coeff):
            return "phi~ has an odd coefficient on phi x^k"
    return None


def superconformal_residuals(f: CoordMap, weight: Optional[int] = None) -> Dict[str, SuperSeries]:
    """Superconformality residuals of an N=2 map, kept where the truncation certifies them."""
    if f.flavor not in _SUPERCONFORMAL_FLAVOR:
        raise ExpMapError("superconformality applies to the N=2 flavors")
    weight = weight or f.weight or MAX_WEIGHT
    result = is_superconformal(f.components, _SUPERCONFORMAL_FLAVOR[f.flavor])
    bound = 2 * weight - 2
    residuals = {}
    for label, residual in result.residuals.items():
        kept = truncate(residual, bound, f.locus)
        if not kept.is_zero():
            residuals[label] = kept
    return residuals


def is_superconformal_map(f: CoordMap, weight: Optional[int] = None) -> bool:
    return not superconformal_residuals(f, weight)


def _sqrt_canonical(value: GrassmannElement) -> GrassmannElement:
    try:
        root = value.sqrt()
    except ValueError as error:
        raise ExtractionError(f"leading coefficient {value} has no exact square root: {error}") from None
    if root.body().sign() < 0:
        root = -root
    return root


def _leading_data(f: CoordMap) -> Tuple[GrassmannElement, GrassmannElement]:
    x_new = f.components[0]
    c_x = _leading_coefficient(x_new, 1, ())
    if not _is_even(c_x) or c_x.body().is_zero():
        raise ExtractionError("coefficient of x in x~ is not an invertible even element")
    if f.flavor == "N2_homo":
        ab = _leading_coefficient(f.components[1], 0, ("p",))
        ab_inv = _leading_coefficient(f.components[2], 0, ("m",))
    elif f.flavor == "N2_nonhomo":
        c11 = _leading_coefficient(f.components[1], 0, ("f1",))
        c12 = _leading_coefficient(f.components[1], 0, ("f2",))
        ab = c11 - c12.scale(I)
        ab_inv = c11 + c12.scale(I)
    else:
        ab = None
        ab_inv = _leading_coefficient(f.components[1], 0, ("f",))
    if not _is_even(ab_inv) or ab_inv.body().is_zero():
        raise ExtractionError("leading odd coefficient is not an invertible even element")
    a = _sqrt_canonical(c_x)
    if ab is not None:
        if not _is_even(ab) or ab.body().is_zero():
            raise ExtractionError("leading odd coefficient is not an invertible even element")
        if ab * ab_inv != c_x:
            raise ExtractionError("leading coefficients are inconsistent with a grading element")
        b = a.inverse() * ab
    else:
        b = a * ab_inv.inverse()
    return a, b


def _unknown_patterns(flavor: str, level: int) -> List[Tuple[str, int, int, SuperDerivation]]:
    """Unknowns entering first at doubled excess weight ``level``: (slot, n, parity, derivation)."""
    spec = flavor_spec(flavor)
    family = _FLAVOR_FAMILY[flavor]
    kind_l, kind_j, kind_g1, kind_g2 = _FLAVOR_KINDS[flavor]
    if level % 2:
        n = (level + 1) // 2
        return [
            ("M1", n, 1, make_rep(family, kind_g1, n, generator_count=1, spec=spec)),
            ("M2", n, 1, make_rep(family, kind_g2, n, generator_count=1, spec=spec)),
        ]
    n = level // 2
    return [
        ("A1", n, 0, make_rep(family, kind_l, n, generator_count=1, spec=spec)),
        ("A2", n, 0, make_rep(family, kind_j, n, generator_count=1, spec=spec)),
    ]


def _scalar_terms(series: SuperSeries) -> Dict[Tuple[int, int], Scalar]:
    """Terms of a series with scalar coefficients keyed by (x exponent, odd mask)."""
    return {(exps[0], mask): coeff for (exps, mask), coeff in series.raw_terms().items()}


def _data_from_slots(a, b, slots: Dict[str, List[GrassmannElement]], weight: int) -> InfinitesimalData:
    return InfinitesimalData(a, b, tuple(slots["A1"]), tuple(slots["A2"]), tuple(slots["M1"]), tuple(slots["M2"]), weight)


def _grassmann_from_poly(poly: Poly, odd_count: int, generator_count: int) -> GrassmannElement:
    terms = {mask >> odd_count: Scalar._raw(num, den) for (_, mask), (num, den) in poly.items()}
    return GrassmannElement._from_masks(generator_count, terms)


def _structure_failure(f: CoordMap, weight: int) -> Optional[str]:
    """Reason an N=2 map is not superconformal, or ``None``."""
    if f.flavor == "N1":
        return None
    residuals = superconformal_residuals(f, weight)
    if residuals:
        label = sorted(residuals)[0]
        return f"not superconformal: residual {label} = {residuals[label]}"
    return None


def _inadmissible(f: CoordMap, weight: int, message: str) -> ExtractionError:
    structural = _structure_failure(f, weight)
    return ExtractionError(structural or f"inadmissible map: {message}")


def _extract_zero(f: CoordMap, weight: int) -> InfinitesimalData:
    """Solve for the data level by level in the doubled excess weight.

    The terms of excess ``d`` above the leading weight depend linearly on the
    unknowns first entering at ``d`` and polynomially on earlier ones, so
    each level is a linear system over the Grassmann algebra with scalar
    matrix.  The result is verified by recomputing the map.
    """
    flavor = f.flavor
    spec = flavor_spec(flavor)
    L = f.generator_count
    kernel = _kernel(flavor, "zero")
    odd_count = kernel.odd_count
    f = f.truncated(weight)
    _check_vanishing(f)
    if flavor == "N1":
        violation = restricted_shape_violation(f)
        if violation:
            raise ExtractionError(f"not in the restricted superanalytic shape: {violation}")
    try:
        a, b = _leading_data(f)
    except ExtractionError:
        structural = _structure_failure(f, weight)
        if structural:
            raise ExtractionError(structural) from None
        raise
    # strip the grading: grading^{-1} o f is exp(T) applied to the coordinates
    inverse_images = _grading_inverse_images(flavor, a, b)
    polys = [Kernel.from_series(c) for c in f.components]
    constant = kernel.constant
    stripped = [kernel.mul(polys[0], constant((a * a).inverse()))]
    if flavor == "N2_nonhomo":
        matrix = [[inverse_images[row].coefficient({}, (column,)) for column in ("f1", "f2")] for row in ("f1", "f2")]
        for row in matrix:
            stripped.append(kernel.add(kernel.mul(polys[1], constant(row[0])), kernel.mul(polys[2], constant(row[1]))))
    else:
        for index, name in enumerate(spec.odd_vars):
            factor = inverse_images[name].coefficient({}, (name,))
            stripped.append(kernel.mul(polys[1 + index], constant(factor)))
    bounds = component_bounds(flavor, weight)
    coordinates = [Kernel.from_series(c) for c in CoordMap.identity(flavor, L).components]
    leading = leading_double_weights(flavor, "zero")
    kinds = _FLAVOR_KINDS[flavor]
    zero = GrassmannElement.zero(L)
    one = GrassmannElement.one(L)
    slots = {key: [zero] * (weight - 1) for key in ("A1", "A2", "M1", "M2")}
    for level in range(1, 2 * weight - 1):
        if level % 2:
            n, parity = (level + 1) // 2, 1
            unknowns = [("M1", kinds[2]), ("M2", kinds[3])]
        else:
            n, parity = level // 2, 0
            unknowns = [("A1", kinds[0]), ("A2", kinds[1])]
        T = _derivation_terms(_data_from_slots(one, one, slots, weight), flavor, "zero")
        rows: Dict[Tuple[int, int, int], List[Scalar]] = {}
        rhs: Dict[Tuple[int, int, int], GrassmannElement] = {}
        for index in range(len(coordinates)):
            target_weight = leading[index] + level
            if target_weight > bounds[index]:
                continue
            image = kernel.slice(kernel.exp(T, coordinates[index], target_weight), target_weight)
            residual = kernel.sub(kernel.slice(stripped[index], target_weight), image)
            for (k, formal), value in _split_grassmann(residual, odd_count).items():
                rhs[(index, k, formal)] = _grassmann_from_poly(value, odd_count, L)
        for column, (_, kind) in enumerate(unknowns):
            for variable, pattern in _pattern(flavor, kind, n):
                index = 0 if variable < 0 else 1 + variable
                if leading[index] + level > bounds[index]:
                    continue
                for (k, mask), (num, den) in pattern.items():
                    value = Scalar._raw(num, den)
                    if parity and popcount(mask) % 2:
                        value = -value
                    rows.setdefault((index, k, mask), [Scalar(0)] * len(unknowns))[column] = -value
        keys = sorted(set(rows) | set(rhs))
        if not keys:
            continue
        matrix = [rows.get(key, [Scalar(0)] * len(unknowns)) for key in keys]
        values = [rhs.get(key, zero) for key in keys]
        solution = solve_linear(matrix, values, zero)
        if solution is None:
            raise _inadmissible(f, weight, f"no infinitesimal data matches the terms of excess weight {Fraction(level, 2)}")
        for (slot, _), value in zip(unknowns, solution):
            if (parity == 1 and not _is_odd(value)) or (parity == 0 and not _is_even(value)):
                raise _inadmissible(f, weight, f"{slot}[{n}] would have the wrong parity")
            slots[slot][n - 1] = value
    result = _data_from_slots(a, b, slots, weight)
    check = _hat_e_polys(result, flavor, "zero", weight)
    for index, (left, right) in enumerate(zip(check, polys)):
        if left != right:
            raise _inadmissible(f, weight, f"component {index} is not reproduced by any infinitesimal data")
    return result


def extract(f: CoordMap, target: str, weight: Optional[int] = None) -> InfinitesimalData:
    """The unique data ``g`` with ``hatE(g) = f`` to truncation weight ``weight``.

    An infinity map ``f`` satisfies ``f o I^{-1} = hatE(g)`` at the zero locus
    exactly when ``f = hatE(g)`` at the infinity locus, so the data are read
    off from ``f o I^{-1}``.
    """
    _check_choice(target, TARGETS, "target")
    if TARGET_FLAVOR[target] != f.flavor:
        raise ExtractionError(f"target {target} needs a {TARGET_FLAVOR[target]} map, got {f.flavor}")
    weight = weight or f.weight or DEFAULT_WEIGHT
    _check_weight(weight)
    if f.locus == "zero":
        return _extract_zero(f, weight)
    result = _extract_zero(to_zero_locus(f), weight)
    check = _hat_e_polys(result, f.flavor, "infinity", weight)
    for index, (left, right) in enumerate(zip(check, f.truncated(weight).components)):
        if left != Kernel.from_series(right):
            raise ExtractionError(f"inadmissible map: component {index} is not reproduced at the infinity locus")
    return result


# ---------------------------------------------------------------------------
# Group laws


def _law_flavor(law: str, basis: str) -> str:
    _check_choice(law, LAWS, "law")
    if law == "N1":
        return "N1"
    _check_choice(basis, tuple(BASIS_FLAVOR), "basis")
    return BASIS_FLAVOR[basis]


def _common_weight(g: InfinitesimalData, h: InfinitesimalData, weight: Optional[int]) -> int:
    if g.generator_count != h.generator_count:
        raise ExpMapError("data use different generator counts")
    weight = weight or min(g.weight, h.weight)
    _check_weight(weight)
    return weight


def compose_at_zero(
    g: InfinitesimalData, h: InfinitesimalData, law: str = "N2", weight: Optional[int] = None, basis: str = "nonhomo"
) -> InfinitesimalData:
    """``g o_0 h = hatE^{-1}(hatE(h) o hatE(g))``; ``hatE(g)`` is applied first."""
    weight = _common_weight(g, h, weight)
    flavor = _law_flavor(law, basis)
    composite = compose_maps(hat_e(h, flavor, "zero", weight), hat_e(g, flavor, "zero", weight), weight)
    try:
        return extract(composite, FLAVOR_TARGET[flavor], weight)
    except ExtractionError as error:
        raise ExpMapError(f"internal error: composite left the admissible shape ({error})") from None


INFINITY_CONVENTIONS = ("printed", "consistent")


def compose_at_infinity(
    g: InfinitesimalData,
    h: InfinitesimalData,
    law: str = "N2",
    weight: Optional[int] = None,
    basis: str = "nonhomo",
    convention: str = "printed",
) -> InfinitesimalData:
    """``g o_inf h``.

    ``printed``: extract ``hatE(h) o I^{-1} o hatE(g) o I^{-1}`` at zero, read
    the result as ``(c0_1, c0_2, C1, -C2, -i O1, -i O2)`` and undo that twist.
    Since ``hatE_inf(g) o I^{-1} = hatE_0(g)``, this equals the untwisted
    ``g o_0 h``, which has no identity element.

    ``consistent``: the same twist with infinity maps ``hatE_0(twisted g) o I``,
    i.e. ``untwist(twist(g) o_0 twist(h))``; this is a group.
    """
    _check_choice(convention, INFINITY_CONVENTIONS, "convention")
    weight = _common_weight(g, h, weight)
    flavor = _law_flavor(law, basis)
    if convention == "consistent":
        return compose_at_zero(g.twisted(), h.twisted(), law, weight, basis).untwisted()
    outer = to_zero_locus(hat_e(h, flavor, "infinity", weight))
    inner = to_zero_locus(hat_e(g, flavor, "infinity", weight))
    composite = compose_maps(outer, inner, weight)
    try:
        twisted = extract(composite, FLAVOR_TARGET[flavor], weight)
    except ExtractionError as error:
        raise ExpMapError(f"internal error: composite left the admissible shape ({error})") from None
    return twisted.untwisted()


def compose(
    g: InfinitesimalData,
    h: InfinitesimalData,
    locus: str,
    law: str,
    weight: Optional[int] = None,
    basis: str = "nonhomo",
    convention: str = "printed",
) -> InfinitesimalData:
    _check_choice(locus, LOCI, "locus")
    if locus == "zero":
        return compose_at_zero(g, h, law, weight, basis)
    return compose_at_infinity(g, h, law, weight, basis, convention)


def _linear_part_inverse(f: CoordMap) -> Tuple[GrassmannElement, List[List[GrassmannElement]]]:
    """Inverse of the weight-leading linear part of a zero-locus map."""
    spec = flavor_spec(f.flavor)
    c_x = f.components[0].coefficient({"x": 1})
    if not _is_even(c_x) or c_x.body().is_zero():
        raise ExpMapError("leading coefficient of x~ is not invertible")
    odd = spec.odd_vars
    matrix = [[f.components[1 + r].coefficient({}, (odd[c],)) for c in range(len(odd))] for r in range(len(odd))]
    if len(odd) == 1:
        inverse = [[matrix[0][0].inverse()]]
    else:
        (p, q), (r, t) = matrix
        det_inverse = (p * t - q * r).inverse()
        inverse = [[t * det_inverse, -q * det_inverse], [-r * det_inverse, p * det_inverse]]
    return c_x.inverse(), inverse


def inverse_map(f: CoordMap, weight: Optional[int] = None) -> CoordMap:
    """Compositional inverse of a zero-locus map to truncation weight ``weight``.

    Iterates ``H <- H - A^{-1}(f o H - id)`` with ``A`` the linear part of
    ``f``; every step fixes at least one more half-unit of weight.
    """
    if f.locus != "zero":
        raise ExpMapError("inverse_map works at the zero locus")
    weight = weight or f.weight or DEFAULT_WEIGHT
    spec = flavor_spec(f.flavor)
    L = f.generator_count
    x_inverse, odd_inverse = _linear_part_inverse(f)
    identity = CoordMap.identity(f.flavor, L, weight)
    const = lambda value: _constant(spec, L, value)  # noqa: E731

    def apply_inverse_linear(vector: Sequence[SuperSeries]) -> List[SuperSeries]:
        result = [vector[0] * const(x_inverse)]
        for row in odd_inverse:
            total = SuperSeries.zero(spec, L)
            for entry, component in zip(row, vector[1:]):
                total = total + component * const(entry)
            result.append(total)
        return result

    candidate = CoordMap(f.flavor, tuple(apply_inverse_linear(identity.components)), "zero", weight)
    for _ in range(2 * weight + 2):
        defect = [c - i for c, i in zip(compose_maps(f, candidate, weight).components, identity.components)]
        if all(d.is_zero() for d in defect):
            return candidate
        correction = apply_inverse_linear(defect)
        components = tuple(c - d for c, d in zip(candidate.components, correction))
        candidate = CoordMap(f.flavor, components, "zero", weight).truncated(weight)
    raise ExpMapError("compositional inverse iteration did not converge")


def inverse_element(
    g: InfinitesimalData,
    locus: str = "zero",
    law: str = "N2",
    weight: Optional[int] = None,
    basis: str = "nonhomo",
    convention: str = "printed",
) -> InfinitesimalData:
    """Group inverse: the data of the compositional inverse of ``hatE(g)``."""
    _check_choice(locus, LOCI, "locus")
    _check_choice(convention, INFINITY_CONVENTIONS, "convention")
    weight = weight or g.weight
    flavor = _law_flavor(law, basis)
    target = FLAVOR_TARGET[flavor]
    if locus == "zero":
        return extract(inverse_map(hat_e(g, flavor, "zero", weight), weight), target, weight)
    if convention == "consistent":
        return inverse_element(g.twisted(), "zero", law, weight, basis).untwisted()
    # hatE(h) o I^{-1} inverts hatE(g) o I^{-1}
    zero_map = to_zero_locus(hat_e(g, flavor, "infinity", weight))
    return extract(to_infinity_locus(inverse_map(zero_map, weight)), target, weight)


def group_law_check(
    elements: Sequence[InfinitesimalData],
    locus: str,
    law: str,
    weight: int,
    basis: str = "nonhomo",
    convention: str = "printed",
) -> dict:
    """Identity, inverse and associativity checks on the given elements."""
    failures: List[str] = []
    identity = InfinitesimalData.identity(weight, elements[0].generator_count)
    elements = [e.truncated(weight) for e in elements]

    def op(left: InfinitesimalData, right: InfinitesimalData) -> InfinitesimalData:
        return compose(left, right, locus, law, weight, basis, convention)

    for index, g in enumerate(elements):
        if op(g, identity) != g:
            failures.append(f"right identity fails for element {index}")
        if op(identity, g) != g:
            failures.append(f"left identity fails for element {index}")
        inverse = inverse_element(g, locus, law, weight, basis, convention)
        if op(inverse, g) != identity:
            failures.append(f"left inverse fails for element {index}")
        if op(g, inverse) != identity:
            failures.append(f"right inverse fails for element {index}")
    for index in range(len(elements) - 2):
        g, h, k = elements[index : index + 3]
        if op(op(g, h), k) != op(g, op(h, k)):
            failures.append(f"associativity fails for elements {index}..{index + 2}")
    return {
        "locus": locus,
        "law": law,
        "weight": weight,
        "convention": convention if locus == "infinity" else None,
        "elements": len(elements),
        "failures": failures,
        "pass": not failures,
    }


def check_isomorphism(
    g: InfinitesimalData, h: InfinitesimalData, locus: str = "zero", weight: Optional[int] = None, convention: str = "printed"
) -> dict:
    """Compare the N=2 law (nonhomogeneous) with the N=1 law on the same pair."""
    weight = _common_weight(g, h, weight)
    n2 = compose(g, h, locus, "N2", weight, convention=convention)
    n1 = compose(g, h, locus, "N1", weight, convention=convention)
    return {"locus": locus, "weight": weight, "N2": n2.to_json(), "N1": n1.to_json(), "equal": n2 == n1}


# ---------------------------------------------------------------------------
# Composition switch


def _switch_map(g: InfinitesimalData, flavor: str, locus: str, relative_bound: int) -> Tuple[SuperSeries, ...]:
    """``exp(T) . grading . (x, phi)`` with each component kept to ``relative_bound`` above its leading weight."""
    L = g.generator_count
    images = grading_images(flavor, locus, g.a0_1, g.a0_2)
    coordinates = CoordMap.identity(flavor, L).components
    T = infinitesimal_derivation(g, flavor, locus)
    result = []
    for coordinate, lead in zip(coordinates, leading_double_weights(flavor, locus)):
        lead = lead if locus == "zero" else -lead
        graded = substitute_linear(coordinate, images)
        result.append(exp_series(T, graded, lead + relative_bound, locus))
    return tuple(result)


def _substitute_truncated(series: SuperSeries, images: Sequence[SuperSeries], flavor: str, locus: str, bound: int) -> SuperSeries:
    """``series`` evaluated at ``images``, exact for terms of doubled weight at most ``bound``.

    Powers of the even image use ``(lead (1 + rest/lead))^k`` with the
    binomial series truncated by weight, so negative exponents are allowed.
    """
    spec = flavor_spec(flavor)
    L = series.generator_count
    x_image = images[0]
    lead_weight = 2 if locus == "zero" else -2
    lead_part = x_image.filter(lambda exps, mask: mask == 0 and double_weight(exps, mask, locus) == lead_weight)
    if len(lead_part) == 0:
        raise ExpMapError("even image has no invertible leading term")
    ((exps0, _), lead_coeff), = lead_part.coefficients().items()
    if lead_coeff.body().is_zero():
        raise ExpMapError("even image has a non-invertible leading term")
    lead_inverse = SuperSeries.monomial(spec, L, {"x": -exps0[0]}, (), lead_coeff.inverse())
    ratio = (x_image - lead_part) * lead_inverse
    odd_images = dict(zip(spec.odd_vars, images[1:]))
    result = SuperSeries.zero(spec, L)
    for (exps, names), coeff in series.coefficients().items():
        k = exps[0]
        w0 = double_weight(exps, sum(1 << spec.odd_index(v) for v in names), locus)
        if w0 > bound:
            continue
        relative = bound - w0
        binomial = SuperSeries.one(spec, L)
        power = SuperSeries.one(spec, L)
        j = 0
        coefficient = Fraction(1)
        while True:
            j += 1
            power = truncate(power * ratio, relative, locus)
            if power.is_zero():
                break
            coefficient = coefficient * (k - j + 1) / j
            if coefficient == 0:
                break
            binomial = binomial + power.scale(coefficient)
        lead_power = SuperSeries.monomial(spec, L, {"x": exps0[0] * k}, (), lead_coeff ** k if k >= 0 else lead_coeff.inverse() ** (-k))
        odd_factor = SuperSeries.one(spec, L)
        for name in names:
            odd_factor = odd_factor * odd_images[name]
        piece = truncate(odd_factor * lead_power, bound, locus) * binomial
        result = result + truncate(piece, bound, locus) * _constant(spec, L, coeff)
    return truncate(result, bound, locus)


def composition_switch_check(
    f1: Sequence[SuperSeries],
    g: InfinitesimalData,
    weight: int,
    flavor: str = "N1",
    locus: str = "zero",
) -> dict:
    """Compare ``f1 o f2`` with ``exp(T) . grading`` applied to the components of ``f1``.

    ``f2 = exp(T) . grading . (x, phi)``.  Both sides are compared on every
    term of locus weight at most ``weight``; ``f1`` may contain negative
    powers of ``x``.
    """
    _check_choice(flavor, FLAVORS, "flavor")
    _check_choice(locus, LOCI, "locus")
    spec = flavor_spec(flavor)
    f1 = tuple(c if c.spec == spec else c.reframe(spec) for c in f1)
    for component in f1:
        if not component.is_exact():
            raise ExpMapError("composition switch needs certified (exact) components")
    bound = 2 * weight
    lows = [min_double_weight(c, locus) for c in f1]
    lows = [v for v in lows if v is not None]
    low = min(lows) if lows else 0
    relative = bound - low + 2
    f2 = _switch_map(g, flavor, locus, relative)
    left = tuple(_substitute_truncated(c, f2, flavor, locus, bound) for c in f1)
    images = grading_images(flavor, locus, g.a0_1, g.a0_2)
    T = infinitesimal_derivation(g, flavor, locus)
    right = tuple(exp_series(T, substitute_linear(c, images), bound, locus) for c in f1)
    mismatches = []
    for index, (l_series, r_series) in enumerate(zip(left, right)):
        difference = l_series - r_series
        for (exps, names), coeff in sorted(difference.coefficients().items()):
            mismatches.append({"component": index, "exponents": list(exps), "odd_monomial": list(names), "difference": str(coeff)})
    return {"flavor": flavor, "locus": locus, "weight": weight, "mismatches": mismatches, "pass": not mismatches}


# ---------------------------------------------------------------------------
# Properties


def weight_filtration_check(g: InfinitesimalData, flavor: str, locus: str = "zero") -> bool:
    """Recomputing at weight ``N + 2`` and cutting back to ``N`` reproduces the weight ``N`` map."""
    low = _hat_e(g, flavor, locus, g.weight)
    high = _hat_e(g, flavor, locus, g.weight + 2)
    return high.truncated(g.weight) == low
