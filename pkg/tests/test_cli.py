import json
from pathlib import Path

import pytest
import yaml

from natlift.cli import main
from natlift.errors import ConfigError
from natlift.scenario import SUITES, Scenario, emit_report, load_scenario, run_scenario


def write(tmp_path, data, name="s.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


def strip_timing(d):
    d = json.loads(d)
    d["environment"].pop("seconds")
    for s in d["suites"]:
        s.pop("seconds")
    return d


def test_flat_scenario_passes():
    sc = Scenario.from_mapping(
        {"n": 2, "c": 0, "a1": "1", "a3": "0", "lambda": "1", "samples": 10,
         "suites": ["almost_complex", "curvature_vs_oracle"]}
    )  # fmt: skip
    rep = run_scenario(sc)
    assert rep.passed
    assert rep.suite("almost_complex").max_residual == 0.0
    assert rep.suite("curvature_vs_oracle").max_residual < 1e-8


def test_acceptance_scenario():
    sc = Scenario.from_mapping(
        {"n": 2, "c": 1, "k": 4, "a1": "1", "a3": "0", "t_max": 0.4, "samples": 100, "seed": 7,
         "suites": ["main_theorem", "lambda_sensitivity"]}
    )  # fmt: skip
    rep = run_scenario(sc)
    assert rep.suite("main_theorem").max_residual < 1e-7
    assert rep.suite("lambda_sensitivity").details["min_perturbed_residual"] > 1e-3
    assert rep.passed


def test_negative_control_constant_lambda():
    sc = Scenario.from_mapping(
        {"n": 2, "c": 1, "k": 4, "lambda": "1", "samples": 20, "seed": 3,
         "suites": ["main_theorem", "lambda_sensitivity"]}
    )  # fmt: skip
    rep = run_scenario(sc)
    main_res = rep.suite("main_theorem")
    assert not main_res.passed and main_res.max_residual > 1e-3
    gap = rep.suite("lambda_sensitivity")
    assert not gap.passed
    assert gap.details["max_nominal_residual"] > 1e-3
    assert not rep.passed


def test_every_suite_once_and_defaults():
    sc = Scenario.from_mapping({"n": 2, "c": -1, "k": -4, "samples": 4, "oracle_samples": 1})
    rep = run_scenario(sc)
    assert [s.name for s in rep.suites] == list(SUITES)
    assert rep.passed, emit_report(rep, "text").decode()
    no_k = Scenario.from_mapping({"n": 2, "c": 1, "lambda": "1/(1+t)", "samples": 2})
    assert "main_theorem" not in no_k.suites and "k0_consistency" in no_k.suites


def test_determinism():
    sc = Scenario.from_mapping({"n": 3, "c": 1, "k": 4, "a1": "1+t/2", "samples": 15, "seed": 11,
                                "suites": ["hermitian", "main_theorem"]})  # fmt: skip
    a = strip_timing(emit_report(run_scenario(sc), "json"))
    b = strip_timing(emit_report(run_scenario(sc), "json"))
    assert a == b


def test_emit_empty_and_single():
    sc = Scenario.from_mapping({"n": 2, "c": 1, "k": 4, "samples": 3, "suites": []})
    rep = run_scenario(sc)
    d = json.loads(emit_report(rep, "json"))
    assert d["schema_version"] == "1" and d["suites"] == [] and "seed" in d["environment"]
    one = run_scenario(Scenario.from_mapping({"n": 2, "c": 1, "k": 4, "samples": 3, "suites": ["almost_complex"]}))
    text = emit_report(one, "text").decode()
    rows = [line for line in text.splitlines() if line.startswith("almost_complex")]
    assert len(rows) == 1 and rows[0].endswith("PASS")
    with pytest.raises(ValueError):
        emit_report(one, "xml")


def test_matrix_report_has_all_columns():
    sc = Scenario.from_mapping({"n": 2, "c": 1, "k": 4, "a1": "1+t/2", "a3": "t/2", "samples": 3, "oracle_samples": 1})
    d = json.loads(emit_report(run_scenario(sc), "json"))
    assert len(d["suites"]) == 11
    for s in d["suites"]:
        assert {"name", "max_residual", "mean_residual", "worst_point", "tolerance", "passed"} <= set(s)
        assert set(s["worst_point"]) == {"q", "p", "t"}
        assert s["passed"] == (s["max_residual"] < s["tolerance"])


def test_invalid_points_are_counted():
    sc = Scenario.from_mapping({"n": 2, "c": 1, "lambda": "1", "a1": "1 - 5*t", "samples": 40,
                                "suites": ["almost_complex"]})  # fmt: skip
    rep = run_scenario(sc)
    assert rep.points["invalid"].get("NonpositiveA1", 0) > 4
    assert rep.domain_failure and not rep.passed


@pytest.mark.parametrize(
    "data",
    [
        {"n": 2},
        {"n": 2, "c": 1},
        {"n": 2, "c": 1, "k": 4, "suites": ["nope"]},
        {"n": 2, "c": 1, "lambda": "1", "suites": ["main_theorem"]},
        {"n": 2, "c": 1, "k": 4, "a1": "sin(t)"},
        {"n": 2, "c": 1, "k": 4, "colour": "blue"},
        {"n": 2, "c": 1, "k": 4, "samples": 0},
        {"n": 2, "c": 1, "k": 4, "tolerances": {"nope": 1}},
        [1, 2],
    ],
)
def test_config_errors(data):
    with pytest.raises(ConfigError):
        Scenario.from_mapping(data)


def test_load_json_and_missing(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"n": 2, "c": 1, "k": 4}))
    assert load_scenario(p).k == 4.0
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("n: [1, 2\n")
    with pytest.raises(ConfigError):
        load_scenario(bad)


def test_cli_exit_codes(tmp_path, capsys):
    good = write(tmp_path, {"n": 2, "c": 1, "k": 4, "samples": 5, "suites": ["main_theorem"]})
    assert main(["run", str(good)]) == 0
    assert "main_theorem" in capsys.readouterr().out

    bad = write(tmp_path, {"n": 2, "c": 1, "k": 4, "lambda": "1", "samples": 5, "suites": ["main_theorem"]}, "b.yaml")
    assert main(["run", str(bad), "--format", "json"]) == 1
    assert json.loads(capsys.readouterr().out)["passed"] is False

    broken = write(tmp_path, {"n": 2}, "c.yaml")
    assert main(["run", str(broken)]) == 2

    invalid = write(tmp_path, {"n": 2, "c": 1, "lambda": "1", "a1": "1-5*t", "samples": 20,
                               "suites": ["almost_complex"]}, "d.yaml")  # fmt: skip
    assert main(["run", str(invalid)]) == 2


def test_cli_overrides_and_out(tmp_path):
    cfg = write(tmp_path, {"n": 2, "c": 1, "k": 4, "samples": 50, "seed": 1, "suites": ["hermitian"]})
    out = tmp_path / "r.json"
    assert main(["run", str(cfg), "--format", "json", "--out", str(out), "--seed", "9", "--samples", "4"]) == 0
    d = json.loads(out.read_text())
    assert d["environment"]["seed"] == 9 and d["points"]["requested"] == 4


def test_shipped_scenarios_parse():
    root = Path(__file__).parent.parent / "scenarios"
    files = sorted(root.glob("*.*"))
    assert files
    for f in files:
        assert load_scenario(f).samples >= 1
