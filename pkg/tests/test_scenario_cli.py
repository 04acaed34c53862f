import csv
import io
import json
import subprocess
import sys

import pytest

from matterwave import cli, phase, scenario
from matterwave.phase import ChirpError
from matterwave.scenario import (
    CSV_COLUMNS,
    ScenarioError,
    ScenarioReport,
    canonical_json,
    emit,
    parse_scenario,
    run,
)

MINIMAL = """\
params.m = 2.2e-25
params.g = 9.8
params.T = 0.1
params.kappa = 1.6e7
"""


def test_minimal_scenario_defaults():
    s = parse_scenario(MINIMAL)
    assert s.params.c == 2.99792458e8
    assert s.params.hbar == 1.054571817e-34
    assert s.params.v_x0 == 0.0
    assert s.device == "both" and s.frame == "both"
    assert len(s.configurations()) == 4


def test_comments_lists_and_booleans():
    s = parse_scenario(MINIMAL + "device = atom  # fountain\nchirp.enabled = true\nchirp.omega_dot = 3.1e8\n"
                       "outputs = phase, trajectories\nsweep.g = 4.9, 9.8\n")
    assert s.chirp_enabled and s.chirp_omega_dot == 3.1e8
    assert s.outputs == ("phase", "trajectories")
    assert [p.g for p in s.parameter_points()] == [4.9, 9.8]
    assert len(s.configurations()) == 4


@pytest.mark.parametrize("extra, line, message", [
    ("params.q = 1\n", 5, "unknown key"),
    ("params.g = 1\n", 5, "duplicate"),
    ("device = photon\n", 5, "expected one of"),
    ("just words\n", 5, "key = value"),
    ("params.v_x0 = fast\n", 5, "expected a number"),
    ("sweep.g = 1,,2\n", 5, "non-empty"),
    ("trajectory.samples = 1.5\n", 5, "integer"),
])
def test_parse_errors_carry_line_numbers(extra, line, message):
    with pytest.raises(ScenarioError, match=message) as info:
        parse_scenario(MINIMAL + extra)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_domain_errors():
    with pytest.raises(ScenarioError, match="T must be positive"):
        parse_scenario(MINIMAL.replace("params.T = 0.1", "params.T = -0.1"))
    with pytest.raises(ScenarioError, match="missing required"):
        parse_scenario("params.m = 1e-25\n")
    with pytest.raises(ScenarioError, match="invalid sweep"):
        parse_scenario(MINIMAL + "sweep.g = -1\n")


def test_chirp_on_neutron_is_rejected():
    with pytest.raises(ChirpError):
        parse_scenario(MINIMAL + "device = neutron\nchirp.enabled = true\n")


def test_overrides_replace_keys():
    s = parse_scenario(MINIMAL, overrides=["params.g=4.9", "sweep.T = 0.1, 0.2"])
    assert s.params.g == 4.9
    assert s.sweeps["T"] == [0.1, 0.2]
    with pytest.raises(ScenarioError):
        parse_scenario(MINIMAL, overrides=["nope=1"])


def test_four_situations_report():
    report = run(parse_scenario(scenario.FOUR_SITUATIONS))
    assert report.passed
    totals = [e["phase"]["total"] for e in report.configurations]
    R = report.configurations[0]["R"]
    assert all(abs(t + R) <= 1e-12 * R for t in totals)
    dt = [e["propertime"]["closed_form"]["delta_tau"] for e in report.configurations]
    p = parse_scenario(scenario.FOUR_SITUATIONS).params
    want = 4 * p.v_y0 * p.g * p.T**2 / p.c**2
    assert dt[:2] == [0.0, 0.0]
    assert dt[2] == pytest.approx(want, rel=1e-12) and dt[3] == pytest.approx(want, rel=1e-12)
    assert [e["label"] for e in report.configurations] == ["atom-lab", "atom-freefall", "neutron-lab", "neutron-freefall"]


def test_zero_gravity_scenario():
    report = run(parse_scenario(MINIMAL.replace("params.g = 9.8", "params.g = 0")))
    assert report.passed
    for e in report.configurations:
        assert e["phase"]["total"] == 0.0
        assert e["propertime"]["closed_form"]["delta_tau"] == 0.0


def test_g_sweep_fits_exponent_two():
    text = MINIMAL + "device = neutron\nparams.v_x0 = 1000\nsweep.g = 2.45, 4.9, 9.8\n"
    report = run(parse_scenario(text))
    fits = {(f["label"], f["quantity"]): f["exponent"] for f in report.scaling}
    assert fits[("neutron-lab", "tau_upper_residual")] == pytest.approx(2.0, abs=0.05)
    assert fits[("neutron-lab", "trajectory_residual")] == pytest.approx(2.0, abs=0.05)
    # straight free-fall arms do not bend
    assert fits[("neutron-freefall", "trajectory_residual")] is None


def test_chirped_atom_scenario():
    report = run(parse_scenario(MINIMAL + "device = atom\nchirp.enabled = true\n"))
    for e in report.configurations:
        assert abs(e["phase"]["total"]) <= 1e-12 * e["R"]
        assert e["phase"]["laser_phase"] == pytest.approx(e["R"], rel=1e-12)


def test_json_is_canonical_and_round_trips():
    s = parse_scenario(scenario.FOUR_SITUATIONS)
    text = emit(run(s), "json")
    assert text == emit(run(s), "json")
    assert text == emit(run(s, jobs=4), "json")
    data = json.loads(text)
    assert list(data) == sorted(data)
    again = ScenarioReport.from_dict(data)
    assert emit(again, "json") == text
    assert again == run(s)


def test_float_formatting():
    assert canonical_json(2.0) == "2.0"
    assert canonical_json(0.1) == "0.10000000000000001"
    assert canonical_json({"b": 1, "a": [True, None]}) == '{"a":[true,null],"b":1}'
    with pytest.raises(ValueError):
        canonical_json(float("nan"))


def test_empty_report():
    report = ScenarioReport(schema_version=1, scenario={"name": "empty"}, configurations=[])
    rows = list(csv.reader(io.StringIO(emit(report, "csv"))))
    assert rows == [list(CSV_COLUMNS)]
    assert json.loads(emit(report, "json"))["configurations"] == []
    assert "overall" in emit(report, "table")


def test_trajectory_csv():
    s = parse_scenario(MINIMAL + "outputs = trajectories\ntrajectory.samples = 5\n")
    rows = list(csv.DictReader(io.StringIO(emit(run(s), "csv"))))
    assert len(rows) == 4 * 5
    assert set(rows[0]) == set(CSV_COLUMNS)
    assert rows[0]["device"] == "atom" and rows[0]["frame"] == "lab"
    last = rows[4]
    assert float(last["y_upper"]) == pytest.approx(-2 * 9.8 * 0.01, rel=1e-12)


def test_table_color(monkeypatch):
    report = run(parse_scenario(MINIMAL))
    assert "\033[" in emit(report, "table", color=True)
    assert "\033[" not in emit(report, "table", color=False)
    monkeypatch.setenv("NO_COLOR", "1")
    assert not scenario.use_color()


def test_run_error_names_configuration(monkeypatch):
    def broken(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr(phase, "detected_phase", broken)
    with pytest.raises(scenario.ScenarioRunError, match="atom-lab"):
        run(parse_scenario(MINIMAL))


# --- command line

def test_cli_run_file_and_stdin(tmp_path, capsys, monkeypatch):
    path = tmp_path / "s.cfg"
    path.write_text(MINIMAL)
    assert cli.main(["run", str(path), "--format", "table"]) == 0
    assert "atom-lab" in capsys.readouterr().out
    monkeypatch.setattr(sys, "stdin", io.StringIO(MINIMAL))
    assert cli.main(["run", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_cli_output_file(tmp_path):
    out = tmp_path / "r.csv"
    assert cli.main(["demo", "four-situations", "--format", "csv", "--output", str(out)]) == 0
    assert out.read_text().startswith(",".join(CSV_COLUMNS))


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(MINIMAL + "oops = 1\n")
    assert cli.main(["run", str(bad)]) == 2
    assert "line 5" in capsys.readouterr().err
    assert cli.main(["demo", "four-situations", "--output", str(tmp_path / "no" / "such" / "file")]) == 2


def test_cli_sweep(capsys):
    assert cli.main(["sweep", "--set", "sweep.g=4.9,9.8", "--set", "outputs=phase,propertime"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["configurations"]) == 8


def test_cli_check_and_injection(capsys):
    assert cli.main(["check"]) == 0
    for route in cli.ROUTES:
        assert cli.main(["check", "--inject-sign-error", route]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_check_fails_when_a_route_breaks(monkeypatch, capsys):
    original = phase.golden_rule_phase
    monkeypatch.setattr(phase, "golden_rule_phase", lambda df, p: -original(df, p))
    assert cli.main(["check"]) != 0


def test_exit_status_follows_tolerances(monkeypatch, capsys):
    monkeypatch.setattr(scenario, "ROUTE_RTOL", 0.0)
    # atom-lab routes differ at rounding level, so a zero tolerance must fail
    assert cli.main(["demo", "four-situations"]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "matterwave", "demo", "four-situations", "--format", "table"],
                          capture_output=True, text=True, env={"NO_COLOR": "1", "PATH": ""})
    assert proc.returncode == 0, proc.stderr
    assert "\033[" not in proc.stdout
