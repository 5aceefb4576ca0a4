"""Superderivations on super series and the superconformal representations.

A :class:`SuperDerivation` is ``sum_v c_v * d/dv`` over the variables of a
spec, with odd derivatives acting from the left.  Since a derivation is
determined by its values on the coordinates, brackets are computed in that
canonical form and then confirmed on a basis of probe monomials.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .grassmann import I, ONE, GrassmannElement, Scalar
from .ns_algebra import (
    HOMOGENEOUS,
    NONHOMOGENEOUS,
    NsBasisElement,
    NsElement,
    basis_bracket,
    basis_elements,
)
from .superseries import (
    SeriesError,
    SuperSeries,
    VariableSpec,
    compare_on_region,
    intersect_regions,
    ss_derive,
)

DEFAULT_GENERATORS = 4
DEFAULT_WINDOW = 16
REP_RANGE = (-3, 3)

FAMILIES = ("homo2", "nonhomo2", "n1_superconformal", "n1_Ds", "n2_one_var")
FAMILY_VARIABLES = {
    "homo2": ("x", ("p", "m")),  # phi+, phi-
    "nonhomo2": ("x", ("f1", "f2")),  # phi(1), phi(2)
    "n1_superconformal": ("x", ("f",)),
    "n1_Ds": ("x", ("f",)),
    "n2_one_var": ("x", ("f",)),
}
FAMILY_KINDS = {
    "homo2": ("L", "J", "Gplus", "Gminus"),
    "nonhomo2": ("L", "J", "G1", "G2"),
    "n1_superconformal": ("L", "G"),
    "n1_Ds": ("L", "G"),
    "n2_one_var": ("L", "J", "G1", "G2"),
}


class DerivationError(ValueError):
    """Raised for spec mismatches, unknown kinds and failed probe confirmations."""


def family_spec(family: str, window: int = DEFAULT_WINDOW) -> VariableSpec:
    if family not in FAMILY_VARIABLES:
        raise DerivationError(f"unknown family {family!r}")
    even, odd = FAMILY_VARIABLES[family]
    return VariableSpec.make((even,), odd, window=(-window, window))


class SuperDerivation:
    """``sum_v coefficient_v * d/dv`` with left odd derivatives."""

    __slots__ = ("spec", "generator_count", "_coefficients")

    def __init__(self, spec: VariableSpec, generator_count: int, coefficients: Optional[Dict[str, SuperSeries]] = None):
        self.spec = spec
        self.generator_count = generator_count
        self._coefficients: Dict[str, SuperSeries] = {}
        for name, coeff in (coefficients or {}).items():
            if not spec.has(name):
                raise DerivationError(f"unknown variable {name!r}")
            if not coeff.spec.same_names(spec):
                raise DerivationError("coefficient spec mismatch")
            if not coeff.is_zero():
                self._coefficients[name] = coeff

    @classmethod
    def partial(cls, spec: VariableSpec, generator_count: int, name: str, coeff: Optional[SuperSeries] = None) -> "SuperDerivation":
        coeff = coeff if coeff is not None else SuperSeries.one(spec, generator_count)
        return cls(spec, generator_count, {name: coeff})

    @property
    def terms(self) -> List[Tuple[SuperSeries, str]]:
        order = self.spec.even_names + self.spec.odd_vars
        return [(self._coefficients[name], name) for name in order if name in self._coefficients]

    def coefficient(self, name: str) -> SuperSeries:
        return self._coefficients.get(name, SuperSeries.zero(self.spec, self.generator_count))

    @property
    def parity(self) -> Optional[int]:
        parities = set()
        for coeff, name in self.terms:
            coeff_parity = coeff.parity()
            if coeff_parity is None:
                return None
            target = 1 if name in self.spec.odd_vars else 0
            parities.add((coeff_parity + target) % 2)
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def apply(self, series: SuperSeries) -> SuperSeries:
        if not series.spec.same_names(self.spec):
            raise DerivationError("spec mismatch")
        result = SuperSeries.zero(series.spec, self.generator_count)
        for coeff, name in self.terms:
            derivative = ss_derive(series, name)
            if not derivative.is_zero():
                result = result + coeff * derivative
        return result

    __call__ = apply

    def _check(self, other: "SuperDerivation") -> None:
        if not other.spec.same_names(self.spec) or other.generator_count != self.generator_count:
            raise DerivationError("spec mismatch")

    def __add__(self, other: "SuperDerivation") -> "SuperDerivation":
        self._check(other)
        coefficients = dict(self._coefficients)
        for name, coeff in other._coefficients.items():
            coefficients[name] = coefficients[name] + coeff if name in coefficients else coeff
        return SuperDerivation(self.spec, self.generator_count, coefficients)

    def __neg__(self) -> "SuperDerivation":
        return SuperDerivation(self.spec, self.generator_count, {k: -c for k, c in self._coefficients.items()})

    def __sub__(self, other: "SuperDerivation") -> "SuperDerivation":
        return self + (-other)

    def scale(self, factor) -> "SuperDerivation":
        """Left multiplication by a scalar, Grassmann element or series."""
        if isinstance(factor, (Scalar, int, Fraction)):
            return SuperDerivation(self.spec, self.generator_count, {k: c.scale(factor) for k, c in self._coefficients.items()})
        if isinstance(factor, GrassmannElement):
            factor = SuperSeries.constant(self.spec, self.generator_count, factor)
        return SuperDerivation(self.spec, self.generator_count, {k: factor * c for k, c in self._coefficients.items()})

    def __rmul__(self, factor) -> "SuperDerivation":
        return self.scale(factor)

    def is_zero(self) -> bool:
        return not self._coefficients

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperDerivation):
            return NotImplemented
        names = set(self._coefficients) | set(other._coefficients)
        return all(self.coefficient(n) == other.coefficient(n) for n in names)

    def __hash__(self):
        return hash(tuple(sorted(self._coefficients)))

    def __str__(self) -> str:
        if not self._coefficients:
            return "0"
        return " + ".join(f"({coeff})*d/d{name}" for coeff, name in self.terms)

    def __repr__(self) -> str:
        return f"SuperDerivation({self})"


def probe_basis(spec: VariableSpec, generator_count: int, exponents: Iterable[int] = range(-3, 4)) -> List[SuperSeries]:
    """Monomials ``x^k * phi^S`` for the even variable(s) and every odd subset."""
    probes = []
    odd = spec.odd_vars
    subsets = [combo for r in range(len(odd) + 1) for combo in itertools.combinations(odd, r)]
    for exps in itertools.product(list(exponents), repeat=len(spec.even_vars)):
        for subset in subsets:
            probes.append(SuperSeries.monomial(spec, generator_count, dict(zip(spec.even_names, exps)), subset))
    return probes


def _series_equal(left: SuperSeries, right: SuperSeries) -> bool:
    region = intersect_regions(left.safe_window, right.safe_window)
    return not compare_on_region(left, right, region)


def sd_commutator(
    left: SuperDerivation,
    right: SuperDerivation,
    probes: Optional[Sequence[SuperSeries]] = None,
    verify: bool = True,
) -> SuperDerivation:
    """Graded commutator ``ST - (-1)^(|S||T|) TS`` in canonical form.

    With ``verify`` the canonical form is confirmed against the composite
    operator on every probe.
    """
    left._check(right)
    pl, pr = left.parity, right.parity
    if pl is None or pr is None:
        raise DerivationError("commutator needs homogeneous derivations")
    sign = -1 if pl * pr else 1
    spec, generator_count = left.spec, left.generator_count

    def composite(series: SuperSeries) -> SuperSeries:
        first = left.apply(right.apply(series))
        second = right.apply(left.apply(series))
        return first - second if sign > 0 else first + second

    coefficients = {}
    for name in spec.even_names + spec.odd_vars:
        coefficients[name] = composite(SuperSeries.var(spec, generator_count, name))
    result = SuperDerivation(spec, generator_count, coefficients)
    if verify:
        for probe in probes if probes is not None else probe_basis(spec, generator_count):
            if not _series_equal(composite(probe), result.apply(probe)):
                raise DerivationError("commutator does not act as a derivation on a probe")
    return result


def operators_equal_on_probes(
    first: Callable[[SuperSeries], SuperSeries], second: Callable[[SuperSeries], SuperSeries], probes: Sequence[SuperSeries]
) -> bool:
    return all(_series_equal(first(p), second(p)) for p in probes)


# ---------------------------------------------------------------------------
# D operators


def d_operator(spec: VariableSpec, generator_count: int, which: str) -> SuperDerivation:
    """``D+``, ``D-`` (homogeneous), ``D1``, ``D2`` (nonhomogeneous) or ``D`` (one odd variable)."""
    x = spec.even_names[0]
    var = lambda name: SuperSeries.var(spec, generator_count, name)
    partial = lambda name, coeff=None: SuperDerivation.partial(spec, generator_count, name, coeff)
    if which == "D+":
        return partial("p") + partial(x, var("m"))
    if which == "D-":
        return partial("m") + partial(x, var("p"))
    if which in ("D1", "D2"):
        name = "f1" if which == "D1" else "f2"
        return partial(name) + partial(x, var(name))
    if which == "D":
        return partial("f") + partial(x, var("f"))
    raise DerivationError(f"unknown operator {which!r}")


def deformed_d(spec: VariableSpec, generator_count: int, s, sigma=None) -> SuperDerivation:
    """``D_(s, sigma) = (1/s) d/dphi + (s phi + sigma) d/dx`` on a one-odd-variable spec."""
    s = _as_grassmann(s, generator_count)
    sigma = _as_grassmann(sigma if sigma is not None else 0, generator_count)
    if s.parity() not in (0,) or s.body().is_zero():
        raise DerivationError("s must be an invertible even Grassmann element")
    if sigma.parity() not in (1,) and not sigma.is_zero():
        raise DerivationError("sigma must be odd")
    x = spec.even_names[0]
    phi = spec.odd_vars[0]
    constant = lambda value: SuperSeries.constant(spec, generator_count, value)
    coeff_x = constant(s) * SuperSeries.var(spec, generator_count, phi) + constant(sigma)
    return SuperDerivation(spec, generator_count, {phi: constant(s.inverse()), x: coeff_x})


def _as_grassmann(value, generator_count: int) -> GrassmannElement:
    if isinstance(value, GrassmannElement):
        return value
    if isinstance(value, str):
        return GrassmannElement.parse(value, generator_count)
    return GrassmannElement.scalar(generator_count, value)


def check_deformed_square(s, sigma, generator_count: int = DEFAULT_GENERATORS, window: int = DEFAULT_WINDOW) -> dict:
    """``D_(s,sigma)^2 = d/dx`` both as ``[D, D] = 2 d/dx`` and by composing on probes."""
    spec = family_spec("n1_Ds", window)
    operator = deformed_d(spec, generator_count, s, sigma)
    probes = probe_basis(spec, generator_count)
    bracket = sd_commutator(operator, operator, probes)
    target = SuperDerivation.partial(spec, generator_count, "x").scale(2)
    composed = operators_equal_on_probes(
        lambda f: operator.apply(operator.apply(f)), lambda f: ss_derive(f, "x"), probes
    )
    return {
        "s": str(_as_grassmann(s, generator_count)),
        "sigma": str(_as_grassmann(sigma if sigma is not None else 0, generator_count)),
        "bracket_ok": bracket == target,
        "square_ok": composed,
        "pass": bracket == target and composed,
    }


# ---------------------------------------------------------------------------
# Representations


def make_rep(
    family: str,
    kind: str,
    index: int,
    s=None,
    generator_count: int = DEFAULT_GENERATORS,
    window: int = DEFAULT_WINDOW,
    spec: Optional[VariableSpec] = None,
) -> SuperDerivation:
    """The printed superderivation for ``kind`` with ``index`` (odd kinds: mode index - 1/2)."""
    if family not in FAMILIES:
        raise DerivationError(f"unknown family {family!r}")
    if kind not in FAMILY_KINDS[family]:
        raise DerivationError(f"kind {kind!r} is not part of family {family!r}")
    spec = spec or family_spec(family, window)
    L = generator_count
    x = spec.even_names[0]
    n = index

    def mono(power: int, odd: Sequence[str] = (), coeff=ONE) -> SuperSeries:
        return SuperSeries.monomial(spec, L, {x: power}, odd, coeff)

    def der(coefficients: Dict[str, SuperSeries]) -> SuperDerivation:
        return SuperDerivation(spec, L, coefficients)

    half = Fraction(n + 1, 2)
    if kind == "L":
        # L_n = -(x^(n+1) d/dx + (n+1)/2 x^n sum_phi phi d/dphi)
        coefficients = {x: mono(n + 1, coeff=-ONE)}
        for phi in spec.odd_vars:
            coefficients[phi] = mono(n, (phi,), coeff=Scalar(-half))
        return der(coefficients)
    if family == "homo2":
        if kind == "J":
            return der({"p": mono(n, ("p",), -ONE), "m": mono(n, ("m",), ONE)})
        # G+-_(n-1/2) = -(x^n (d/dphi+- - phi-+ d/dx) +- n x^(n-1) phi+ phi- d/dphi+-)
        own, other = ("p", "m") if kind == "Gplus" else ("m", "p")
        sign = 1 if kind == "Gplus" else -1
        coefficients = {own: mono(n, coeff=-ONE) + mono(n - 1, ("p", "m"), Scalar(-sign * n)), x: mono(n, (other,), ONE)}
        return der(coefficients)
    if family == "nonhomo2":
        if kind == "J":
            # i x^n (phi1 d/dphi2 - phi2 d/dphi1)
            return der({"f2": mono(n, ("f1",), I), "f1": mono(n, ("f2",), -I)})
        if kind == "G1":
            return der({"f1": mono(n, coeff=-ONE), x: mono(n, ("f1",), ONE), "f2": mono(n - 1, ("f1", "f2"), Scalar(n))})
        return der({"f2": mono(n, coeff=-ONE), x: mono(n, ("f2",), ONE), "f1": mono(n - 1, ("f1", "f2"), Scalar(-n))})
    if family == "n1_superconformal":
        # G_(n-1/2) = -x^n (d/dphi - phi d/dx)
        return der({"f": mono(n, coeff=-ONE), x: mono(n, ("f",), ONE)})
    if family == "n1_Ds":
        if s is None:
            raise DerivationError("n1_Ds needs the parameter s")
        s_value = _as_grassmann(s, L)
        if s_value.parity() not in (0,) or s_value.body().is_zero():
            raise DerivationError("s must be an invertible even Grassmann element")
        # G_(s, n-1/2) = -x^n ((1/s) d/dphi - s phi d/dx)
        return der({"f": mono(n, coeff=-s_value.inverse()), x: mono(n, ("f",), s_value)})
    # n2_one_var
    if kind == "J":
        return der({"f": mono(n, ("f",))})
    # G(j)_(n-1/2) = (-i)^(j+1) x^n (d/dphi + (-1)^j phi d/dx)
    j = 1 if kind == "G1" else 2
    factor = (-I) ** (j + 1)
    return der({"f": mono(n, coeff=factor), x: mono(n, ("f",), factor * ((-1) ** j))})


def algebra_basis_for(family: str) -> str:
    return HOMOGENEOUS if family == "homo2" else NONHOMOGENEOUS


def _rep_kind(family: str, element: NsBasisElement) -> Optional[str]:
    if family in ("n1_superconformal", "n1_Ds"):
        if element.kind == "G1":
            return "G"
        if element.kind in ("L",):
            return "L"
        return None
    return element.kind


def family_basis(family: str, index_range: Tuple[int, int] = REP_RANGE) -> List[NsBasisElement]:
    """Algebra basis elements the family represents (N=1 families use L and G1 as G)."""
    tag = algebra_basis_for(family)
    elements = [e for e in basis_elements(tag, index_range, include_central=False)]
    if family in ("n1_superconformal", "n1_Ds"):
        elements = [e for e in elements if e.kind in ("L", "G1")]
    return elements


def represent(
    family: str,
    vector: Dict[NsBasisElement, Scalar],
    s=None,
    generator_count: int = DEFAULT_GENERATORS,
    spec: Optional[VariableSpec] = None,
) -> SuperDerivation:
    """Image of a scalar combination of basis elements, with ``d`` sent to zero."""
    spec = spec or family_spec(family)
    result = SuperDerivation(spec, generator_count)
    for element, coeff in vector.items():
        if element.kind == "d":
            continue
        kind = _rep_kind(family, element)
        if kind is None:
            raise DerivationError(f"{element} is outside the family {family!r}")
        result = result + make_rep(family, kind, element.index, s, generator_count, spec=spec).scale(coeff)
    return result


def verify_rep(
    family: str,
    index_range: Tuple[int, int] = REP_RANGE,
    s=None,
    generator_count: int = DEFAULT_GENERATORS,
    probe_exponents: Iterable[int] = (-1, 0, 2),
) -> dict:
    """All brackets of represented basis elements agree with the algebra table at ``d = 0``."""
    spec = family_spec(family)
    probes = probe_basis(spec, generator_count, probe_exponents)
    elements = family_basis(family, index_range)
    images = {e: represent(family, {e: ONE}, s, generator_count, spec) for e in elements}
    failures = []
    for u, v in itertools.product(elements, repeat=2):
        bracket = sd_commutator(images[u], images[v], probes)
        expected = represent(family, basis_bracket(u, v), s, generator_count, spec)
        if bracket != expected:
            failures.append([str(u), str(v)])
    return {
        "family": family,
        "s": None if s is None else str(_as_grassmann(s, generator_count)),
        "index_range": list(index_range),
        "pairs": len(elements) ** 2,
        "failures": failures,
        "pass": not failures,
    }


def check_d_family_brackets(generator_count: int = DEFAULT_GENERATORS) -> dict:
    """``[D+, D-] = 2 d/dx``, ``[D+, D+] = 0`` and ``[D(j), D(k)] = 2 delta_jk d/dx``."""
    results = {}
    spec = family_spec("homo2")
    dx = SuperDerivation.partial(spec, generator_count, "x")
    plus, minus = d_operator(spec, generator_count, "D+"), d_operator(spec, generator_count, "D-")
    results["homo_pm"] = sd_commutator(plus, minus) == dx.scale(2)
    results["homo_pp"] = sd_commutator(plus, plus).is_zero()
    results["homo_mm"] = sd_commutator(minus, minus).is_zero()
    spec = family_spec("nonhomo2")
    dx = SuperDerivation.partial(spec, generator_count, "x")
    ops = {j: d_operator(spec, generator_count, f"D{j}") for j in (1, 2)}
    for j in (1, 2):
        for k in (1, 2):
            expected = dx.scale(2) if j == k else SuperDerivation(spec, generator_count)
            results[f"nonhomo_{j}{k}"] = sd_commutator(ops[j], ops[k]) == expected
    return {"checks": results, "pass": all(results.values())}


def check_one_var_spanning(index_range: Tuple[int, int] = REP_RANGE, generator_count: int = DEFAULT_GENERATORS) -> dict:
    """The printed combinations of one-variable L, J, G(1), G(2) give each basic derivation."""
    spec = family_spec("n2_one_var")
    failures = []
    rep = lambda kind, n: make_rep("n2_one_var", kind, n, generator_count=generator_count, spec=spec)
    half = Fraction(1, 2)
    for n in range(index_range[0], index_range[1] + 1):
        targets = {
            "x^n d/dx": (SuperDerivation(spec, generator_count, {"x": SuperSeries.monomial(spec, generator_count, {"x": n})}),
                         -rep("L", n - 1) - rep("J", n - 1).scale(Fraction(n, 2))),
            "x^n phi d/dx": (SuperDerivation(spec, generator_count, {"x": SuperSeries.monomial(spec, generator_count, {"x": n}, ("f",))}),
                             (rep("G1", n) - rep("G2", n).scale(I)).scale(half)),
            "x^n d/dphi": (SuperDerivation(spec, generator_count, {"f": SuperSeries.monomial(spec, generator_count, {"x": n})}),
                           (-rep("G1", n) - rep("G2", n).scale(I)).scale(half)),
            "x^n phi d/dphi": (SuperDerivation(spec, generator_count, {"f": SuperSeries.monomial(spec, generator_count, {"x": n}, ("f",))}),
                               rep("J", n)),
        }
        for name, (target, combination) in targets.items():
            if target != combination:
                failures.append([name, n])
    return {"failures": failures, "pass": not failures}


def check_j0_extensions(index_range: Tuple[int, int] = REP_RANGE, generator_count: int = DEFAULT_GENERATORS) -> dict:
    """Both ``J(0) = +- phi d/dphi`` extend the N=1 operators to an N=2 representation.

    ``G*`` is generated as ``i [J(0), G]`` and ``J_n`` from ``[G, G*]``; the
    full nonhomogeneous table with ``d = 0`` is then checked in range.
    """
    spec = family_spec("n2_one_var")
    probes = probe_basis(spec, generator_count, (-1, 0, 2))
    low, high = index_range
    results = {}
    for sign in (1, -1):
        j0 = SuperDerivation(spec, generator_count, {"f": SuperSeries.monomial(spec, generator_count, {}, ("f",), Scalar(sign))})
        images: Dict[NsBasisElement, SuperDerivation] = {}
        for n in range(low - 1, high + 2):
            images[NsBasisElement("L", n, NONHOMOGENEOUS)] = make_rep("n1_superconformal", "L", n, generator_count=generator_count, spec=spec)
            g = make_rep("n1_superconformal", "G", n, generator_count=generator_count, spec=spec)
            images[NsBasisElement("G1", n, NONHOMOGENEOUS)] = g
        for n in range(low - 1, high + 2):
            g = images[NsBasisElement("G1", n, NONHOMOGENEOUS)]
            images[NsBasisElement("G2", n, NONHOMOGENEOUS)] = sd_commutator(j0, g, probes).scale(I)
        for k in range(low, high + 1):
            # [G_(m+1/2), G*_(n-1/2)] = -i (m - n + 1) J_(m+n)
            m, n = (k, 0) if k != -1 else (0, -1)
            g = images[NsBasisElement("G1", m + 1, NONHOMOGENEOUS)]
            g_star = images[NsBasisElement("G2", n, NONHOMOGENEOUS)]
            factor = (-I * (m - n + 1)).inverse()
            images[NsBasisElement("J", k, NONHOMOGENEOUS)] = sd_commutator(g, g_star, probes).scale(factor)
        elements = [e for e in basis_elements(NONHOMOGENEOUS, index_range, include_central=False)]
        failures = []
        for u, v in itertools.product(elements, repeat=2):
            bracket = sd_commutator(images[u], images[v], probes)
            expected = SuperDerivation(spec, generator_count)
            for key, coeff in basis_bracket(u, v).items():
                if key.kind == "d":
                    continue
                if key not in images:
                    expected = None
                    break
                expected = expected + images[key].scale(coeff)
            if expected is None:
                continue
            if bracket != expected:
                failures.append([str(u), str(v)])
        j0_generated = images[NsBasisElement("J", 0, NONHOMOGENEOUS)] == j0
        results["plus" if sign > 0 else "minus"] = {"failures": failures, "j0_consistent": j0_generated, "pass": not failures and j0_generated}
    return {"extensions": results, "pass": all(r["pass"] for r in results.values())}


# ---------------------------------------------------------------------------
# Superconformality


SUPERCONFORMAL_FLAVORS = ("homo2", "nonhomo2", "n1", "n1_Ds")


@dataclass
class SuperconformalResult:
    flavor: str
    residuals: Dict[str, SuperSeries]

    @property
    def is_superconformal(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def __bool__(self) -> bool:
        return self.is_superconformal


def _components(coordinate_map) -> Tuple[SuperSeries, ...]:
    components = getattr(coordinate_map, "components", coordinate_map)
    return tuple(components)


def is_superconformal(coordinate_map, flavor: str, s=None) -> SuperconformalResult:
    """Evaluate the defining residuals of a coordinate map ``(x~, phi~ ...)``.

    Components must be exact series (certified everywhere) in the spec of the
    flavor's source coordinates.
    """
    components = _components(coordinate_map)
    for component in components:
        if not component.is_exact():
            raise DerivationError("superconformality needs certified (exact) components")
    spec = components[0].spec
    generator_count = components[0].generator_count
    if flavor == "homo2":
        x_new, plus_new, minus_new = components
        d_plus = d_operator(spec, generator_count, "D+")
        d_minus = d_operator(spec, generator_count, "D-")
        residuals = {
            "D-phi+": d_minus(plus_new),
            "D+phi-": d_plus(minus_new),
            "D+x - phi- D+phi+": d_plus(x_new) - minus_new * d_plus(plus_new),
            "D-x - phi+ D-phi-": d_minus(x_new) - plus_new * d_minus(minus_new),
        }
    elif flavor == "nonhomo2":
        x_new, one_new, two_new = components
        d1 = d_operator(spec, generator_count, "D1")
        d2 = d_operator(spec, generator_count, "D2")
        residuals = {
            "D1phi1 - D2phi2": d1(one_new) - d2(two_new),
            "D1phi2 + D2phi1": d1(two_new) + d2(one_new),
        }
        for j, op in ((1, d1), (2, d2)):
            residuals[f"D{j}x - phi1 D{j}phi1 - phi2 D{j}phi2"] = op(x_new) - one_new * op(one_new) - two_new * op(two_new)
    elif flavor == "n1":
        x_new, phi_new = components
        d1 = d_operator(spec, generator_count, "D")
        residuals = {"D1x - phi D1phi": d1(x_new) - phi_new * d1(phi_new)}
    elif flavor == "n1_Ds":
        if s is None:
            raise DerivationError("n1_Ds needs the parameter s")
        x_new, phi_new = components
        s_value = _as_grassmann(s, generator_count)
        op = deformed_d(spec, generator_count, s_value)
        scaled = SuperSeries.constant(spec, generator_count, s_value) * phi_new
        residuals = {"Ds x - s phi Ds s phi": op(x_new) - scaled * op(scaled)}
    else:
        raise DerivationError(f"unknown flavor {flavor!r}")
    return SuperconformalResult(flavor, residuals)
