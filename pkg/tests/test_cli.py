import io
import json
import subprocess
import sys

import pytest

from peerhelp.churn import plan_step
from peerhelp.cli import main, run
from peerhelp.model import parse_scenario
from peerhelp.rateplan import load_plans, verify_plan

from conftest import worked6


def invoke(argv):
    out = io.StringIO()
    outcome = run(argv, out=out)
    return outcome, out.getvalue()


@pytest.fixture
def scenario_file(tmp_path):
    p = tmp_path / "six.json"
    p.write_text(worked6().dumps())
    return p


def test_bounds(tmp_path):
    dest = tmp_path / "bounds.csv"
    outcome, text = invoke(["bounds", "--n-max", "100", "--out", str(dest)])
    assert outcome.exit_code == 0
    assert "min corollary_rate 3/4 (0.75) at (2,0)" in text
    assert "min fixed_point_rate 5/6 (0.833333) at (2,0)" in text
    assert "reference chained 1/2 (0.5)" in text
    lines = dest.read_text().splitlines()
    assert lines[0] == "n,q,corollary_rate,fixed_point_rate"
    assert "2,0,3/4,5/6" in lines
    assert outcome.artifacts == [str(dest)]


def test_plan_then_verify(tmp_path, scenario_file):
    plan_path = tmp_path / "plan.json"
    outcome, text = invoke(["plan", "--scenario", str(scenario_file), "--mode", "theorem3",
                            "--out", str(plan_path)])
    assert outcome.exit_code == 0
    assert "subconference 2 n=3 rate=8/9" in text
    assert "violations 0" in text
    data = json.loads(plan_path.read_text())
    assert data["mode"] == "theorem3"
    g2 = next(sp for sp in data["subplans"] if sp["source"] == 2)
    assert g2["rate"] == "8/9" and g2["direct"] == "1/18"
    assert g2["relays"] == [{"user": 4, "rate": "1/2"}, {"user": 6, "rate": "1/3"}]

    outcome, text = invoke(["verify", "--scenario", str(scenario_file), "--plan", str(plan_path)])
    assert outcome.exit_code == 0
    assert "violations 0" in text

    # file round trip matches in-memory verification
    s = parse_scenario(scenario_file.read_text())
    _, plans = load_plans(plan_path.read_text(), s)
    assert verify_plan(s, plans) == plan_step(s, "theorem3").report


def test_verify_tampered(tmp_path, scenario_file):
    plan_path = tmp_path / "plan.json"
    invoke(["plan", "--scenario", str(scenario_file), "--out", str(plan_path)])
    data = json.loads(plan_path.read_text())
    g2 = next(sp for sp in data["subplans"] if sp["source"] == 2)
    g2["relays"][0]["rate"] = "2/3"
    plan_path.write_text(json.dumps(data))
    outcome, text = invoke(["verify", "--scenario", str(scenario_file), "--plan", str(plan_path)])
    assert outcome.exit_code == 1
    assert "violation RelayOverCapacity witness=4,2 amount=1/3" in text


def test_plan_capacity_shortfall(tmp_path):
    p = tmp_path / "worst.json"
    p.write_text(json.dumps({"k": 1, "users": [
        {"id": 1, "watches": [2], "upload": "1"}, {"id": 2, "watches": [1], "upload": "1"},
        {"id": 3, "watches": [1], "upload": "1"}, {"id": 4, "watches": [3], "upload": "1"}]}))
    outcome, text = invoke(["plan", "--scenario", str(p), "--mode", "capacity"])
    assert outcome.exit_code == 0 and "shortfalls 0" in text
    outcome, text = invoke(["plan", "--scenario", str(p), "--mode", "capacity",
                            "--target", "1003/1200"])
    assert outcome.exit_code == 1
    assert "shortfall 1 " in text


def test_oracle_commands(tmp_path):
    outcome, text = invoke(["oracle", "--exhaustive", "5"])
    assert outcome.exit_code == 0
    assert "mismatches 0" in text
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"budget": "5/6", "n": 2, "inCaps": ["1/6", "1/6"], "outCaps": ["1"]}))
    outcome, text = invoke(["oracle", "--config", str(cfg)])
    assert outcome.exit_code == 0
    assert "oracle_rate 5/6" in text and "planner_rate 5/6" in text


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["simulate", "--users", "12", "--steps", "30", "--seed", "4", "--switches-per-step", "2"]
    assert invoke(args + ["--out", str(a)])[0].exit_code == 0
    assert invoke(args + ["--out", str(b)])[0].exit_code == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 30
    c = tmp_path / "c.csv"
    outcome, text = invoke(args + ["--mode", "capacity", "--format", "csv", "--out", str(c)])
    assert outcome.exit_code == 0 and "min_rate 5/6" in text
    assert c.read_text().startswith("step,")


@pytest.mark.parametrize("content, fragment", [
    ('{"k": 1, "users": [{"id": 1, "watches": [1], "upload": "1"}]}', "user 1: self-watch"),
    ('{"k": 1, "users": [', "malformed JSON at line 1"),
    ('{"k": 1, "users": [{"id": 1, "watches": [2], "upload": "0.5"}, {"id": 2, "watches": [1]}]}',
     "user 1: bad upload"),
])
def test_input_errors_exit_2(tmp_path, capsys, content, fragment):
    p = tmp_path / "bad.json"
    p.write_text(content)
    assert main(["plan", "--scenario", str(p)]) == 2
    assert fragment in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path, capsys):
    assert main(["verify", "--scenario", str(tmp_path / "none.json"), "--plan", "x"]) == 2


def test_module_entry_point(scenario_file):
    proc = subprocess.run([sys.executable, "-m", "peerhelp.cli", "plan", "--scenario",
                           str(scenario_file)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "min_rate 8/9" in proc.stdout
