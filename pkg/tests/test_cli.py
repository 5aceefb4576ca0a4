"""Command line driver."""

import json

import pytest

from n2vosa import cli
from n2vosa.expmap import CoordMap, InfinitesimalData, hat_e, inverse_element, random_infinitesimal_data
from n2vosa.grassmann import GrassmannElement

L = 4


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def report(directory):
    return json.loads((directory / cli.REPORT_NAME).read_text())


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--suites", "delta", "--window", "3"],
        ["verify", "--suites", "fields", "--window", "9"],
        ["verify", "--generators", "9"],
        ["verify", "--window", "25"],
        ["verify", "--weight", "9"],
        ["verify", "--suites", "nonsense"],
        ["verify", "--range", "3..-3"],
        ["verify", "--bogus"],
        ["compose"],
    ],
)
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == cli.EXIT_USAGE


def test_ns_relations_example(tmp_path, capsys):
    code, out = run(capsys, "verify", "--suites", "ns-relations", "--range", "-4..4", "--report-dir", str(tmp_path))
    assert code == cli.EXIT_PASS
    data = report(tmp_path)
    assert data["schema_version"] == cli.SCHEMA_VERSION
    assert data["config"]["index_range"] == [-4, 4]
    checks = data["suites"][0]["checks"]
    assert all(check["anchor"] for check in checks)
    assert [check["id"] for check in checks] == sorted(check["id"] for check in checks)


def test_reports_are_deterministic(tmp_path, capsys):
    first, second = tmp_path / "a", tmp_path / "b"
    args = ["verify", "--suites", "grassmann,deformation", "--seed", "3"]
    assert cli.main(args + ["--report-dir", str(first)]) == cli.EXIT_PASS
    assert cli.main(args + ["--report-dir", str(second), "--jobs", "2"]) == cli.EXIT_PASS
    assert (first / cli.REPORT_NAME).read_bytes() == (second / cli.REPORT_NAME).read_bytes()


def test_toml_config_and_flag_precedence(tmp_path, capsys, monkeypatch):
    config = tmp_path / "verify.toml"
    config.write_text('suites = ["grassmann"]\ngenerators = 2\nseed = 5\n')
    monkeypatch.setenv(cli.REPORT_ENV, str(tmp_path / "env"))
    assert cli.main(["verify", "--config", str(config), "--seed", "6"]) == cli.EXIT_PASS
    data = report(tmp_path / "env")
    assert data["config"]["generators"] == 2
    assert data["config"]["seed"] == 6
    assert data["config"]["suites"] == ["grassmann"]


def test_bad_toml_key(tmp_path, capsys):
    config = tmp_path / "verify.toml"
    config.write_text("colour = 1\n")
    assert cli.main(["verify", "--config", str(config)]) == cli.EXIT_USAGE


def test_negative_controls_count_as_passing(tmp_path, capsys):
    assert cli.main(["verify", "--suites", "delta", "--window", "6", "--report-dir", str(tmp_path)]) == cli.EXIT_PASS
    checks = report(tmp_path)["suites"][0]["checks"]
    controls = [check for check in checks if check["negative_control"]]
    assert controls and all(check["pass"] and check["detail"]["mismatches"] for check in controls)


def test_suite_crash_gives_internal_exit_code(tmp_path, monkeypatch, capsys):
    def broken(config):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli.SUITE_RUNNERS, "deformation", broken)
    config = cli.VerifyConfig(suites=("grassmann", "deformation"))
    code, data = cli.run_verify(config, tmp_path)
    assert code == cli.EXIT_INTERNAL
    assert data["summary"]["crashed_suites"] == ["deformation"]
    assert report(tmp_path)["suites"][0]["pass"] is True


def test_failing_check_gives_exit_one(tmp_path, monkeypatch, capsys):
    def failing(config):
        return [cli.CheckRecord("deformation", "always-false", False, "test anchor")]

    monkeypatch.setitem(cli.SUITE_RUNNERS, "deformation", failing)
    code, _ = cli.run_verify(cli.VerifyConfig(suites=("deformation",)), None)
    assert code == cli.EXIT_FAIL


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def test_compose_identity(tmp_path, capsys):
    identity = InfinitesimalData.identity(4, L).to_json()
    g = write(tmp_path / "g.json", identity)
    code, out = run(capsys, "compose", g, g, "--weight", "4")
    assert code == cli.EXIT_PASS
    assert InfinitesimalData.from_json(json.loads(out), L).is_identity()


def test_compose_grading(tmp_path, capsys):
    g = write(tmp_path / "g.json", InfinitesimalData.grading(2, 3, 4, L).to_json())
    h = write(tmp_path / "h.json", InfinitesimalData.grading(5, 7, 4, L).to_json())
    for law in ("N2", "N1"):
        code, out = run(capsys, "compose", g, h, "--law", law, "--weight", "4")
        assert code == cli.EXIT_PASS
        assert InfinitesimalData.from_json(json.loads(out), L) == InfinitesimalData.grading(10, 21, 4, L)


def test_compose_with_inverse(tmp_path, capsys):
    g = random_infinitesimal_data(6, 4, L)
    inverse = inverse_element(g, "zero", "N2", 4)
    code, out = run(capsys, "compose", write(tmp_path / "g.json", g.to_json()), write(tmp_path / "h.json", inverse.to_json()))
    assert code == cli.EXIT_PASS
    assert InfinitesimalData.from_json(json.loads(out), L).is_identity()


def test_compose_malformed(tmp_path, capsys):
    bad = write(tmp_path / "bad.json", {"a0_1": "t1", "a0_2": "1"})
    assert cli.main(["compose", bad, bad]) == cli.EXIT_USAGE


def test_extract_commands(tmp_path, capsys):
    identity = write(tmp_path / "id.json", CoordMap.identity("N2_homo", L).to_json())
    code, out = run(capsys, "extract", identity, "--target", "E2_homo", "--weight", "4")
    assert code == cli.EXIT_PASS
    assert InfinitesimalData.from_json(json.loads(out), L).is_identity()
    grading = hat_e(InfinitesimalData.grading(GrassmannElement.parse("2", L), 3, 4, L), "N2_homo")
    code, out = run(capsys, "extract", write(tmp_path / "gr.json", grading.to_json()), "--target", "E2_homo", "--weight", "4")
    assert InfinitesimalData.from_json(json.loads(out), L) == InfinitesimalData.grading(2, 3, 4, L)
    g = random_infinitesimal_data(12, 5, L)
    dumped = write(tmp_path / "map.json", hat_e(g, "N1").to_json())
    code, out = run(capsys, "extract", dumped, "--target", "E1", "--weight", "5")
    assert InfinitesimalData.from_json(json.loads(out), L) == g


def test_dump_field(capsys):
    code, out = run(capsys, "dump-field", "--label", "mu", "--variable-set", "homogeneous", "--window", "8")
    assert code == cli.EXIT_PASS
    assert json.loads(out)["label"] == "mu"
    assert cli.main(["dump-field", "--label", "nope"]) == cli.EXIT_USAGE


def test_dump_rep(capsys):
    code, out = run(capsys, "dump-rep", "--family", "n2_one_var", "--kind", "J", "--mode", "2")
    assert code == cli.EXIT_PASS
    assert set(json.loads(out)["coefficients"]) == {"f"}
    code, out = run(capsys, "dump-rep", "--family", "n1_Ds", "--kind", "G", "--mode", "-1/2", "--s", "3")
    assert code == cli.EXIT_PASS
    assert cli.main(["dump-rep", "--family", "homo2", "--kind", "Gplus", "--mode", "1"]) == cli.EXIT_USAGE
