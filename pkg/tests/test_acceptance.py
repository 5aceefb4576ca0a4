"""Acceptance criteria, one PASS/FAIL line each, all at exact equality."""

import subprocess
import sys
import time

from n2vosa import delta, expmap, grassmann, ns_algebra, ns_fields, superderiv

L = 4


def test_criterion_1_ns_bracket_tables(report_criterion):
    started = time.monotonic()
    results = {basis: ns_algebra.verify_lie_superalgebra(basis, (-4, 4)) for basis in ns_algebra.BASIS_TAGS}
    spots = [
        ns_algebra.bracket_text("J(2)", "J(-2)") == ns_algebra.parse_element("2/3*d"),
        ns_algebra.bracket_text("G+(3/2)", "G-(-3/2)") == ns_algebra.parse_element("2*L(0) + 3*J(0) + 2/3*d"),
        ns_algebra.bracket_text("G1(1/2)", "G2(-1/2)") == ns_algebra.parse_element("-i*J(0)", ns_algebra.NONHOMOGENEOUS),
    ]
    elapsed = time.monotonic() - started
    passed = all(r["pass"] for r in results.values()) and all(spots) and elapsed < 10
    report_criterion(1, passed, f"super-skew/Jacobi both bases -4..4, spot values {sum(spots)}/3, {elapsed:.1f}s")
    assert passed


def test_criterion_2_representations(report_criterion):
    started = time.monotonic()
    cases = [("homo2", None), ("nonhomo2", None), ("n1_superconformal", None), ("n1_Ds", 3), ("n1_Ds", "1+t1*t2"), ("n2_one_var", None)]
    failures = [(family, s) for family, s in cases if not superderiv.verify_rep(family, (-3, 3), s)["pass"]]
    elapsed = time.monotonic() - started
    passed = not failures and elapsed < 30
    report_criterion(2, passed, f"{len(cases) - len(failures)}/{len(cases)} families reproduce the relations at d=0, {elapsed:.1f}s")
    assert passed


def test_criterion_3_delta_suite(report_criterion):
    failures = []
    for window in (6, 9, 12):
        reports = [delta.check_two_term(window, k) for k in range(3)]
        reports += [delta.check_three_term(window, k) for k in range(3)]
        reports += [delta.check_expansion(n, window) for n in range(3)]
        spec = delta.delta_spec(window)
        probes = [
            delta.SuperSeries.var(spec, L, "x1"),
            delta.SuperSeries.monomial(spec, L, {"x1": -1}),
            delta.SuperSeries.monomial(spec, L, {"x1": 2}, ("p1",)),
        ]
        reports += [delta.delta_substitution_check(probe, window) for probe in probes]
        failures += [f"{r.identity_id}[W={window}]" for r in reports if not r.passed]
    broken = delta.check_two_term(12, 0, negative_control=True)
    detected = not broken.passed
    passed = not failures and detected
    report_criterion(3, passed, f"windows 6/9/12: {len(failures)} failing identities, sign-flipped control detected={detected}")
    assert passed


def test_criterion_4_deformed_square(report_criterion):
    pairs = [(1, 0), (3, 0), ("1+t1*t2", "t1"), (2, "t1+t2")]
    ok = [superderiv.check_deformed_square(s, sigma)["pass"] for s, sigma in pairs]
    passed = all(ok)
    report_criterion(4, passed, f"D_(s,sigma)^2 = d/dx for {sum(ok)}/{len(pairs)} parameter pairs")
    assert passed


def test_criterion_5_exponential_and_extraction(report_criterion):
    started = time.monotonic()
    failures = []
    for weight in (4, 6):
        for target in expmap.TARGETS:
            flavor = expmap.TARGET_FLAVOR[target]
            for seed in range(20):
                g = expmap.random_infinitesimal_data(seed, weight, L)
                f = expmap.hat_e(g, flavor, "zero", weight)
                if expmap.extract(f, target, weight) != g:
                    failures.append((target, weight, seed, "round trip"))
                if flavor == "N1":
                    if expmap.restricted_shape_violation(f) is not None:
                        failures.append((target, weight, seed, "shape"))
                elif not expmap.is_superconformal_map(f, weight):
                    failures.append((target, weight, seed, "superconformal"))
    elapsed = time.monotonic() - started
    passed = not failures and elapsed < 60
    report_criterion(5, passed, f"120 round trips with shape/superconformal checks, {len(failures)} failures, {elapsed:.1f}s")
    assert passed


def test_criterion_6_group_laws(report_criterion):
    outcomes = {}
    for locus, weight in (("zero", 5), ("infinity", 4)):
        elements = [expmap.random_infinitesimal_data(seed, weight, L) for seed in range(3)]
        for law in ("N2", "N1"):
            outcomes[f"{locus}/{law}"] = expmap.group_law_check(elements, locus, law, weight)["pass"]
    passed = all(outcomes.values())
    detail = ", ".join(f"{key}={'ok' if ok else 'fail'}" for key, ok in outcomes.items())
    report_criterion(6, passed, f"identity/inverse/associativity: {detail}")
    assert passed


def test_criterion_7_isomorphism(report_criterion):
    mismatches = {}
    for locus in expmap.LOCI:
        count = 0
        for pair in range(20):
            g = expmap.random_infinitesimal_data(500 + 2 * pair, 6, L)
            h = expmap.random_infinitesimal_data(501 + 2 * pair, 6, L)
            if not expmap.check_isomorphism(g, h, locus, 6)["equal"]:
                count += 1
        mismatches[locus] = count
    passed = not any(mismatches.values())
    report_criterion(7, passed, f"N2 law equals N1 law on 20 pairs, mismatches {mismatches}")
    assert passed


def test_criterion_8_fields_suite(report_criterion):
    started = time.monotonic()
    reports = ns_fields.run_field_checks(12)
    elapsed = time.monotonic() - started
    failing = [r.identity_id for r in reports if not r.passed]
    ids = {r.identity_id.split("[")[0] for r in reports}
    required = {
        "bracket-vs-ope", "ns-relations-from-ope", "derivative", "conjugation",
        "to-nonhomogeneous", "weak-supercommutativity", "weak-supercommutativity-negative-control",
    }
    passed = not failing and required <= ids and elapsed < 60
    report_criterion(8, passed, f"{len(reports) - len(failing)}/{len(reports)} field identities at window 12, {elapsed:.1f}s")
    assert passed


def test_criterion_9_grassmann_kernel(report_criterion):
    results = {count: grassmann.check_kernel(0, count, 200)["pass"] for count in (2, 4, 6)}
    passed = all(results.values())
    report_criterion(9, passed, f"200 seeded elements per L: {results}")
    assert passed


def test_criterion_10_full_verify(report_criterion, tmp_path):
    started = time.monotonic()
    completed = subprocess.run(
        [sys.executable, "-m", "n2vosa.cli", "verify", "--suites", "all", "--report-dir", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    elapsed = time.monotonic() - started
    failed = [line.strip() for line in completed.stdout.splitlines() if line.strip().startswith("FAIL ")]
    passed = completed.returncode == 0 and elapsed < 300
    report_criterion(10, passed, f"exit code {completed.returncode} in {elapsed:.0f}s; failing checks: {failed or 'none'}")
    assert passed
