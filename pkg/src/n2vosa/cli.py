"""Command line driver: batch verification with a deterministic JSON report, plus small dump tools.

Exit codes: 0 every check passed, 1 some check failed, 2 usage or configuration
error, 3 internal error (a partial report is still written).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from . import delta as delta_mod
from . import expmap
from . import grassmann
from . import ns_algebra
from . import ns_fields
from . import superderiv
from .superseries import SuperSeries

SCHEMA_VERSION = 1
REPORT_ENV = "N2VOSA_REPORT_DIR"
REPORT_NAME = "n2vosa-report.json"

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

SUITES = ("grassmann", "delta", "ns-relations", "representations", "fields", "group-laws", "isomorphism", "deformation")
MAX_GENERATORS = 8
MAX_WINDOW = 24
MAX_WEIGHT = 8
MAX_RANGE = 8
SUITE_MIN_WINDOW = {"delta": delta_mod.MIN_WINDOW, "fields": ns_fields.MIN_SUITE_WINDOW}
MAX_DETAIL_MISMATCHES = 20


class ConfigError(ValueError):
    """Invalid verification configuration (exit code 2)."""


class UsageError(ValueError):
    """Invalid arguments or input files for a dump subcommand (exit code 2)."""


@dataclass(frozen=True)
class VerifyConfig:
    generators: int = 4
    window: int = 12
    weight: int = 6
    index_range: Tuple[int, int] = (-4, 4)
    seed: int = 0
    suites: Tuple[str, ...] = SUITES
    infinity_convention: str = "printed"

    def validate(self) -> "VerifyConfig":
        if not 2 <= self.generators <= MAX_GENERATORS:
            raise ConfigError(f"generators must lie in 2..{MAX_GENERATORS}, got {self.generators}")
        if self.window > MAX_WINDOW:
            raise ConfigError(f"window must be at most {MAX_WINDOW}, got {self.window}")
        for suite in self.suites:
            if suite not in SUITES:
                raise ConfigError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
            minimum = SUITE_MIN_WINDOW.get(suite)
            if minimum is not None and self.window < minimum:
                raise ConfigError(f"suite {suite} needs window >= {minimum}, got {self.window}")
        if not 2 <= self.weight <= MAX_WEIGHT:
            raise ConfigError(f"weight must lie in 2..{MAX_WEIGHT}, got {self.weight}")
        low, high = self.index_range
        if low > high or max(abs(low), abs(high)) > MAX_RANGE:
            raise ConfigError(f"range must satisfy a <= b within -{MAX_RANGE}..{MAX_RANGE}, got {low}..{high}")
        if self.infinity_convention not in expmap.INFINITY_CONVENTIONS:
            raise ConfigError(f"infinity convention must be one of {expmap.INFINITY_CONVENTIONS}")
        return self

    def to_json(self) -> dict:
        data = asdict(self)
        data["index_range"] = list(self.index_range)
        data["suites"] = list(self.suites)
        return data


def parse_range(text) -> Tuple[int, int]:
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return int(text[0]), int(text[1])
    try:
        low, high = str(text).split("..")
        return int(low), int(high)
    except ValueError:
        raise ConfigError(f"range must look like a..b, got {text!r}") from None


def parse_suites(value) -> Tuple[str, ...]:
    names = value if isinstance(value, (list, tuple)) else [part.strip() for part in str(value).split(",") if part.strip()]
    if list(names) == ["all"]:
        return SUITES
    if not names:
        raise ConfigError("no suites selected")
    ordered = tuple(name for name in SUITES if name in names)
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {', '.join(unknown)}; expected one of {', '.join(SUITES)} or all")
    return ordered


# ---------------------------------------------------------------------------
# Check records


@dataclass
class CheckRecord:
    suite: str
    id: str
    passed: bool
    anchor: str
    negative_control: bool = False
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "id": self.id,
            "pass": self.passed,
            "anchor": self.anchor,
            "negative_control": self.negative_control,
            "detail": self.detail,
        }


def _trim(detail: dict) -> dict:
    """Cap long failure lists so reports stay readable."""
    trimmed = {}
    for key, value in detail.items():
        if isinstance(value, list) and len(value) > MAX_DETAIL_MISMATCHES and key not in ("index_range", "safe_region"):
            trimmed[key] = value[:MAX_DETAIL_MISMATCHES]
            trimmed[key + "_total"] = len(value)
        else:
            trimmed[key] = value
    return trimmed


def _delta_record(suite: str, report: delta_mod.DeltaReport, anchor: str, negative_control: bool = False) -> CheckRecord:
    detail = _trim(report.to_json())
    if negative_control:
        # passes when the identity checker rejects the broken input
        return CheckRecord(suite, report.identity_id, not report.passed, anchor, True, detail)
    return CheckRecord(suite, report.identity_id, report.passed, anchor, False, detail)


def _dict_record(suite: str, check_id: str, result: dict, anchor: str) -> CheckRecord:
    return CheckRecord(suite, check_id, bool(result["pass"]), anchor, False, _trim(result))


# ---------------------------------------------------------------------------
# Suites


def suite_grassmann(config: VerifyConfig) -> List[CheckRecord]:
    records = []
    for count in (2, 4, 6, 8):
        if count > config.generators:
            continue
        result = grassmann.check_kernel(config.seed, count)
        records.append(_dict_record("grassmann", f"kernel[L={count}]", result,
                                    "Grassmann algebra: inverse of invertible elements, supercommutativity, nilpotent souls"))
    return records


def _substitution_probe(window: int, generator_count: int) -> SuperSeries:
    spec = delta_mod.delta_spec(window)
    L = generator_count
    return (
        SuperSeries.monomial(spec, L, {"x1": 2, "x0": 1})
        + SuperSeries.monomial(spec, L, {"x1": -1}, ("p1", "m2"))
        + SuperSeries.monomial(spec, L, {"x1": 1, "x2": -1}, ("m1",))
    )


def suite_delta(config: VerifyConfig) -> List[CheckRecord]:
    windows = sorted({w for w in (6, 9, 12) if w <= config.window} | {config.window})
    L = min(config.generators, delta_mod.DEFAULT_GENERATORS)
    records = []
    for window in windows:
        for order in range(3):
            records.append(_delta_record("delta", delta_mod.check_two_term(window, order, generator_count=L),
                                         "two-term delta identity with odd shifts, derivative order k"))
            records.append(_delta_record("delta", delta_mod.check_three_term(window, order, generator_count=L),
                                         "three-term delta identity with odd shifts, derivative order k"))
        for power in range(3):
            records.append(_delta_record("delta", delta_mod.check_expansion(power, window, generator_count=L),
                                         "difference of the two expansions of (x1-x2-shift)^(-n-1) as a delta derivative"))
        probe = _substitution_probe(window, L)
        records.append(_delta_record("delta", delta_mod.delta_substitution_check(probe, window),
                                     "delta substitution rule x1 -> x2+x0+shift"))
        broken = delta_mod.check_two_term(window, 0, negative_control=True, generator_count=L)
        records.append(_delta_record("delta", broken, "two-term delta identity with the odd shift sign flipped on one side",
                                     negative_control=True))
    for record in records:
        record.id = f"{record.id}[W={record.detail['window']}]"
    return records


_SPOT_VALUES = (
    ("J(2)", "J(-2)", "2/3*d", ns_algebra.HOMOGENEOUS),
    ("G+(3/2)", "G-(-3/2)", "2*L(0) + 3*J(0) + 2/3*d", ns_algebra.HOMOGENEOUS),
    ("G1(1/2)", "G2(-1/2)", "-i*J(0)", ns_algebra.NONHOMOGENEOUS),
)


def suite_ns_relations(config: VerifyConfig) -> List[CheckRecord]:
    records = []
    for basis in ns_algebra.BASIS_TAGS:
        result = ns_algebra.verify_lie_superalgebra(basis, config.index_range)
        records.append(_dict_record("ns-relations", f"lie-superalgebra[{basis}]", result,
                                    "N=2 Neveu-Schwarz brackets: super-skew symmetry, super-Jacobi identity, central d"))
    for left, right, expected, basis in _SPOT_VALUES:
        value = ns_algebra.bracket_text(left, right)
        target = ns_algebra.parse_element(expected, basis)
        records.append(CheckRecord("ns-relations", f"spot[{left},{right}]", value == target,
                                   "N=2 Neveu-Schwarz bracket table value",
                                   detail={"computed": str(value), "expected": str(target)}))
    result = ns_algebra.verify_conversion_homomorphism(config.index_range)
    records.append(_dict_record("ns-relations", "basis-conversion-homomorphism", result,
                                "change between homogeneous and nonhomogeneous bases preserves brackets"))
    for kind in ns_algebra.SUBALGEBRA_KINDS:
        result = ns_algebra.check_subalgebra_closure(kind, ns_algebra.HOMOGENEOUS, config.index_range)
        records.append(_dict_record("ns-relations", f"subalgebra-closure[{kind}]", result,
                                    "distinguished finite and N=1 subalgebras close under the bracket"))
    return records


_REP_CASES = (
    ("homo2", None),
    ("nonhomo2", None),
    ("n1_superconformal", None),
    ("n1_Ds", 3),
    ("n1_Ds", "1+t1*t2"),
    ("n2_one_var", None),
)


def suite_representations(config: VerifyConfig) -> List[CheckRecord]:
    low, high = config.index_range
    rep_range = (max(low, superderiv.REP_RANGE[0]), min(high, superderiv.REP_RANGE[1]))
    L = config.generators
    records = []
    for family, s in _REP_CASES:
        result = superderiv.verify_rep(family, rep_range, s, L)
        suffix = "" if s is None else f",s={s}"
        records.append(_dict_record("representations", f"rep[{family}{suffix}]", result,
                                    "superderivation representation reproduces the Neveu-Schwarz brackets at d=0"))
    records.append(_dict_record("representations", "d-family-brackets", superderiv.check_d_family_brackets(L),
                                "brackets among the distinguished odd derivations"))
    records.append(_dict_record("representations", "one-variable-spanning", superderiv.check_one_var_spanning(rep_range, L),
                                "one-odd-variable N=2 representation spans the N=1 derivations"))
    records.append(_dict_record("representations", "j0-extensions", superderiv.check_j0_extensions(rep_range, L),
                                "extensions of the N=1 representation by J(0)"))
    return records


_FIELD_ANCHORS = (
    ("bracket-vs-ope", "supercommutator of Y(mu) with itself against the operator product expansion"),
    ("ns-relations", "Neveu-Schwarz relations recovered from residues of the mu commutator"),
    ("derivative", "odd and even derivative properties of vertex operators"),
    ("bracket-specialization", "brackets of L(0), J(0), G(1/2) modes with vertex operators"),
    ("grading", "L(0) and J(0) grading of vertex operators"),
    ("reconstruction", "vertex operators reconstructed from their odd-free components"),
    ("conjugation", "L(0) and J(0) conjugation of vertex operators"),
    ("to-nonhomogeneous", "Y(mu) in nonhomogeneous odd variables"),
    ("flavor-consistency", "printed nonhomogeneous fields agree with the substituted homogeneous fields"),
    ("flavor-round-trip", "change of odd variables and back is the identity"),
    ("weak-supercommutativity-negative-control", "weak supercommutativity with too small a power must fail"),
    ("weak-supercommutativity", "weak supercommutativity of Y(mu) with itself"),
)


def _field_anchor(identity_id: str) -> str:
    for prefix, anchor in _FIELD_ANCHORS:
        if identity_id.startswith(prefix):
            return anchor
    return "N=2 superconformal vertex operator identity"


def suite_fields(config: VerifyConfig) -> List[CheckRecord]:
    records = []
    for report in ns_fields.run_field_checks(config.window):
        negative = "negative-control" in report.identity_id
        record = _delta_record("fields", report, _field_anchor(report.identity_id))
        record.negative_control = negative
        records.append(record)
    return records


ROUND_TRIP_SAMPLES = 20
GROUP_SAMPLES = 3
ISOMORPHISM_PAIRS = 20


def _group_elements(config: VerifyConfig, weight: int) -> List[expmap.InfinitesimalData]:
    return [expmap.random_infinitesimal_data(config.seed * 1000 + j, weight, config.generators) for j in range(GROUP_SAMPLES)]


def switch_probe(generator_count: int) -> Tuple[SuperSeries, SuperSeries]:
    """An exact N=1 map ``(x^2 + x^-1, x phi)`` used for the composition switch."""
    spec = expmap.flavor_spec("N1")
    even = SuperSeries.monomial(spec, generator_count, {"x": 2}) + SuperSeries.monomial(spec, generator_count, {"x": -1})
    odd = SuperSeries.monomial(spec, generator_count, {"x": 1}, ("f",))
    return even, odd


def suite_group_laws(config: VerifyConfig) -> List[CheckRecord]:
    N = config.weight
    L = config.generators
    records = []
    for weight in sorted({min(4, N), N}):
        for target in expmap.TARGETS:
            flavor = expmap.TARGET_FLAVOR[target]
            failures = []
            for sample in range(ROUND_TRIP_SAMPLES):
                g = expmap.random_infinitesimal_data(config.seed * 1000 + sample, weight, L)
                f = expmap.hat_e(g, flavor, "zero", weight)
                if expmap.extract(f, target, weight) != g:
                    failures.append(f"extract(hatE(g)) != g for sample {sample}")
                if flavor == "N1":
                    violation = expmap.restricted_shape_violation(f)
                    if violation:
                        failures.append(f"sample {sample} leaves the restricted shape: {violation}")
                elif not expmap.is_superconformal_map(f, weight):
                    failures.append(f"sample {sample} is not superconformal")
            records.append(CheckRecord("group-laws", f"extract-after-exponential[{target},N={weight}]", not failures,
                                       "extraction inverts the formal exponential map on infinitesimal data",
                                       detail={"target": target, "weight": weight, "samples": ROUND_TRIP_SAMPLES, "failures": failures}))
    elements = _group_elements(config, N)
    laws = (("zero", "N2", "nonhomo"), ("zero", "N2", "homo"), ("zero", "N1", "nonhomo"),
            ("infinity", "N2", "nonhomo"), ("infinity", "N1", "nonhomo"))
    for locus, law, basis in laws:
        result = expmap.group_law_check(elements, locus, law, N, basis, config.infinity_convention)
        label = f"group-law[{locus},{law}" + (f",{basis}" if law == "N2" else "") + "]"
        anchor = f"composition of coordinate maps at {locus}: identity, inverse, associativity"
        if locus == "infinity":
            anchor += f" ({config.infinity_convention} twist)"
        records.append(_dict_record("group-laws", label, result, anchor))
    switch = expmap.composition_switch_check(switch_probe(L), elements[0], N, "N1", "zero")
    records.append(_dict_record("group-laws", "composition-switch[N1,zero]", switch,
                                "substituting exp(T) grading (x, phi) equals exp(T) grading acting on the components"))
    return records


def suite_isomorphism(config: VerifyConfig) -> List[CheckRecord]:
    N = config.weight
    L = config.generators
    records = []
    for locus in expmap.LOCI:
        failures = []
        for pair in range(ISOMORPHISM_PAIRS):
            g = expmap.random_infinitesimal_data(config.seed * 1000 + 500 + 2 * pair, N, L)
            h = expmap.random_infinitesimal_data(config.seed * 1000 + 501 + 2 * pair, N, L)
            result = expmap.check_isomorphism(g, h, locus, N, config.infinity_convention)
            if not result["equal"]:
                failures.append({"pair": pair, "N2": result["N2"], "N1": result["N1"]})
        records.append(CheckRecord("isomorphism", f"n2-equals-n1[{locus}]", not failures,
                                   "the N=2 and N=1 composition laws agree on infinitesimal data",
                                   detail=_trim({"locus": locus, "weight": N, "pairs": ISOMORPHISM_PAIRS, "failures": failures})))
    return records


_DEFORMATIONS = ((1, 0), (3, 0), ("1+t1*t2", "t1"), (2, "t1+t2"))


def suite_deformation(config: VerifyConfig) -> List[CheckRecord]:
    records = []
    for s, sigma in _DEFORMATIONS:
        result = superderiv.check_deformed_square(s, sigma, config.generators)
        records.append(_dict_record("deformation", f"deformed-square[s={s},sigma={sigma}]", result,
                                    "the deformed odd derivation squares to d/dx"))
    return records


SUITE_RUNNERS: Dict[str, Callable[[VerifyConfig], List[CheckRecord]]] = {
    "grassmann": suite_grassmann,
    "delta": suite_delta,
    "ns-relations": suite_ns_relations,
    "representations": suite_representations,
    "fields": suite_fields,
    "group-laws": suite_group_laws,
    "isomorphism": suite_isomorphism,
    "deformation": suite_deformation,
}


def _run_suite(name: str, config: VerifyConfig) -> dict:
    """Run one suite; crashes are captured so the report can still be written."""
    try:
        records = SUITE_RUNNERS[name](config)
    except Exception as error:  # noqa: BLE001
        last = traceback.format_exception_only(type(error), error)[-1].strip()
        return {"suite": name, "error": last, "checks": [], "pass": False}
    checks = sorted((record.to_json() for record in records), key=lambda item: item["id"])
    return {"suite": name, "checks": checks, "pass": all(item["pass"] for item in checks)}


# ---------------------------------------------------------------------------
# Verify


def run_verify(config: VerifyConfig, report_dir: Optional[Path] = None, jobs: int = 1, stream=None) -> Tuple[int, dict]:
    """Run the selected suites and write the report; returns ``(exit_code, report)``."""
    stream = stream or sys.stdout
    config.validate()
    names = list(config.suites)
    if jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(names))) as pool:
            futures = {name: pool.submit(_run_suite, name, config) for name in names}
            results = {name: future.result() for name, future in futures.items()}
    else:
        results = {name: _run_suite(name, config) for name in names}
    suites = [results[name] for name in SUITES if name in results]
    crashed = [suite["suite"] for suite in suites if "error" in suite]
    checks = [check for suite in suites for check in suite["checks"]]
    failed = [check for check in checks if not check["pass"]]
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": config.to_json(),
        "suites": suites,
        "summary": {
            "checks": len(checks),
            "failed": len(failed),
            "crashed_suites": crashed,
            "pass": not failed and not crashed,
        },
    }
    if report_dir is not None:
        report_dir.mkdir(parents=True, exist_ok=True)
        (report_dir / REPORT_NAME).write_text(json.dumps(report, sort_keys=True, indent=1) + "\n")
    for suite in suites:
        if "error" in suite:
            print(f"CRASH {suite['suite']}: {suite['error']}", file=stream)
            continue
        passed = sum(1 for check in suite["checks"] if check["pass"])
        status = "PASS" if suite["pass"] else "FAIL"
        print(f"{status} {suite['suite']}: {passed}/{len(suite['checks'])} checks", file=stream)
        for check in suite["checks"]:
            if not check["pass"]:
                print(f"  FAIL {check['id']}: {check['anchor']}", file=stream)
    if crashed:
        code = EXIT_INTERNAL
    elif failed:
        code = EXIT_FAIL
    else:
        code = EXIT_PASS
    print(f"{'PASS' if code == EXIT_PASS else 'FAIL'}: {len(checks) - len(failed)}/{len(checks)} checks passed", file=stream)
    return code, report


def _load_toml(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except (OSError, tomllib.TOMLDecodeError) as error:
        raise ConfigError(f"cannot read config {path}: {error}") from None
    return data.get("verify", data)


_TOML_KEYS = {"generators", "window", "weight", "range", "seed", "suites", "infinity_convention", "report_dir", "jobs"}


def build_config(args: argparse.Namespace) -> Tuple[VerifyConfig, Optional[Path], int]:
    """Merge defaults, the TOML file and flags (flags win)."""
    file_values = _load_toml(args.config)
    unknown = set(file_values) - _TOML_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return file_values.get(key, default)

    defaults = VerifyConfig()
    try:
        config = VerifyConfig(
            generators=int(pick(args.generators, "generators", defaults.generators)),
            window=int(pick(args.window, "window", defaults.window)),
            weight=int(pick(args.weight, "weight", defaults.weight)),
            index_range=parse_range(pick(args.range, "range", list(defaults.index_range))),
            seed=int(pick(args.seed, "seed", defaults.seed)),
            suites=parse_suites(pick(args.suites, "suites", "all")),
            infinity_convention=str(pick(args.infinity_convention, "infinity_convention", defaults.infinity_convention)),
        )
    except (TypeError, ValueError) as error:
        if isinstance(error, ConfigError):
            raise
        raise ConfigError(str(error)) from None
    report_dir = pick(args.report_dir, "report_dir", os.environ.get(REPORT_ENV))
    jobs = int(pick(args.jobs, "jobs", 1))
    if jobs < 1:
        raise ConfigError("jobs must be positive")
    return config.validate(), (Path(report_dir) if report_dir else None), jobs


# ---------------------------------------------------------------------------
# Dump subcommands


def _read_json(path: str) -> dict:
    try:
        with open(path) as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as error:
        raise UsageError(f"cannot read {path}: {error}") from None


def _print_json(data: dict) -> None:
    print(json.dumps(data, sort_keys=True, indent=1))


def command_compose(args: argparse.Namespace) -> int:
    try:
        g = expmap.InfinitesimalData.from_json(_read_json(args.g), args.generators)
        h = expmap.InfinitesimalData.from_json(_read_json(args.h), args.generators)
        result = expmap.compose(g, h, args.locus, args.law, args.weight, args.basis, args.infinity_convention)
    except (expmap.ExpMapError, KeyError, TypeError, ValueError) as error:
        raise UsageError(f"malformed input: {error}") from None
    _print_json(result.to_json())
    return EXIT_PASS


def command_extract(args: argparse.Namespace) -> int:
    try:
        f = expmap.CoordMap.from_json(_read_json(args.coordmap))
        result = expmap.extract(f, args.target, args.weight)
    except expmap.ExtractionError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_FAIL
    except (expmap.ExpMapError, KeyError, TypeError, ValueError) as error:
        raise UsageError(f"malformed input: {error}") from None
    _print_json(result.to_json())
    return EXIT_PASS


def command_dump_field(args: argparse.Namespace) -> int:
    if not ns_fields.MIN_OPE_WINDOW <= args.window <= MAX_WINDOW:
        raise UsageError(f"window must lie in {ns_fields.MIN_OPE_WINDOW}..{MAX_WINDOW}")
    try:
        variables = ns_fields.variable_set(args.variable_set, args.basis)
        field_value = ns_fields.build_field(args.label, variables, args.window)
    except (ns_fields.FieldError, ns_algebra.NsError, KeyError) as error:
        raise UsageError(str(error)) from None
    _print_json(field_value.to_json())
    return EXIT_PASS


def command_dump_rep(args: argparse.Namespace) -> int:
    try:
        mode = Fraction(args.mode)
        odd = args.kind not in ns_algebra.EVEN_KINDS
        if odd and mode.denominator != 2 or not odd and mode.denominator != 1:
            raise UsageError(f"kind {args.kind} needs {'a half-integer' if odd else 'an integer'} mode, got {args.mode}")
        index = int(mode + Fraction(1, 2)) if odd else int(mode)
        derivation = superderiv.make_rep(args.family, args.kind, index, args.s, args.generators)
    except (superderiv.DerivationError, ValueError, ZeroDivisionError) as error:
        if isinstance(error, UsageError):
            raise
        raise UsageError(str(error)) from None
    coefficients = {name: series.to_json() for series, name in derivation.terms}
    _print_json({"family": args.family, "kind": args.kind, "mode": str(mode), "s": args.s, "coefficients": coefficients})
    return EXIT_PASS


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="n2vosa", description="Exact verifier for N=2 superconformal formal calculus.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = commands.add_parser("verify", help="run identity suites and write a JSON report")
    verify.add_argument("--suites", help="comma separated suite names or 'all'")
    verify.add_argument("--generators", "-L", type=int, help="number of Grassmann generators (default 4)")
    verify.add_argument("--window", "-W", type=int, help="exponent window for series (default 12)")
    verify.add_argument("--weight", "-N", type=int, help="truncation weight for coordinate maps (default 6)")
    verify.add_argument("--range", help="index range a..b for algebra sweeps (default -4..4)")
    verify.add_argument("--seed", type=int, help="random seed (default 0)")
    verify.add_argument("--config", help="TOML file with defaults; flags win")
    verify.add_argument("--report-dir", help=f"directory for {REPORT_NAME} (default ${REPORT_ENV})")
    verify.add_argument("--jobs", type=int, help="number of suites to run concurrently")
    verify.add_argument("--infinity-convention", choices=expmap.INFINITY_CONVENTIONS,
                        help="twist used for composition at infinity (default printed)")

    compose = commands.add_parser("compose", help="compose two infinitesimal data files")
    compose.add_argument("g")
    compose.add_argument("h")
    compose.add_argument("--law", choices=expmap.LAWS, default="N2")
    compose.add_argument("--locus", choices=expmap.LOCI, default="zero")
    compose.add_argument("--weight", type=int)
    compose.add_argument("--basis", choices=tuple(expmap.BASIS_FLAVOR), default="nonhomo")
    compose.add_argument("--generators", type=int, default=expmap.DEFAULT_GENERATORS)
    compose.add_argument("--infinity-convention", choices=expmap.INFINITY_CONVENTIONS, default="printed")

    extract = commands.add_parser("extract", help="infinitesimal data of a coordinate map")
    extract.add_argument("coordmap")
    extract.add_argument("--target", choices=expmap.TARGETS, required=True)
    extract.add_argument("--weight", type=int)

    dump_field = commands.add_parser("dump-field", help="print a vertex operator expansion")
    dump_field.add_argument("--label", required=True)
    dump_field.add_argument("--variable-set", choices=ns_fields.VARIABLE_SET_NAMES, default="homogeneous")
    dump_field.add_argument("--basis", choices=ns_algebra.BASIS_TAGS, help="basis for the modes variable set")
    dump_field.add_argument("--window", type=int, default=ns_fields.DEFAULT_WINDOW)

    dump_rep = commands.add_parser("dump-rep", help="print a superderivation representing a basis element")
    dump_rep.add_argument("--family", choices=superderiv.FAMILIES, required=True)
    dump_rep.add_argument("--kind", required=True, help="L, J, Gplus, Gminus, G1 or G2")
    dump_rep.add_argument("--mode", required=True, help="mode number, e.g. 2 or -3/2")
    dump_rep.add_argument("--s", help="deformation parameter for n1_Ds")
    dump_rep.add_argument("--generators", type=int, default=superderiv.DEFAULT_GENERATORS)
    return parser


_VALUE_OPTIONS = ("--range", "--mode", "--s")


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """Let ``--range -4..4`` or ``--mode -1/2`` through argparse, which would read the value as an option."""
    joined: List[str] = []
    items = list(argv)
    index = 0
    while index < len(items):
        item = items[index]
        if item in _VALUE_OPTIONS and index + 1 < len(items):
            joined.append(f"{item}={items[index + 1]}")
            index += 2
            continue
        joined.append(item)
        index += 1
    return joined


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = _join_negative_values(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.command == "verify":
            config, report_dir, jobs = build_config(args)
            started = time.monotonic()
            code, _ = run_verify(config, report_dir, jobs)
            print(f"elapsed {time.monotonic() - started:.1f}s", file=sys.stderr)
            return code
        handlers = {
            "compose": command_compose,
            "extract": command_extract,
            "dump-field": command_dump_field,
            "dump-rep": command_dump_rep,
        }
        return handlers[args.command](args)
    except (ConfigError, UsageError) as error:
        print(f"usage error: {error}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
