import json

import pytest

from hypermatch.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_run_single_edge(capsys, tmp_path):
    code, out = run(capsys, "run", "--source", "adversary", "--m", "1", "--T", "1", "--out", str(tmp_path))
    rep = json.loads(out)
    assert code == 0 and rep["opt"] == 1 and rep["ratio"] == pytest.approx(0.6201145, abs=1e-7)
    code, out = run(capsys, "certify", str(tmp_path))
    assert code == 0 and json.loads(out)["pass"]
    code, out = run(capsys, "replay", str(tmp_path))
    assert code == 0 and json.loads(out)["match"]


def test_run_from_file(capsys, tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps({"k": 3, "num_offline": 4,
                                "arrivals": [{"online_id": 0, "hyperedges": [[0, 1], [2, 3]]}]}))
    code, out = run(capsys, "run", "--source", f"file:{path}", "--algo", "waterfill", "--strict")
    assert code == 0 and json.loads(out)["certificate"]["pass"]


def test_gadget_value(capsys):
    code, out = run(capsys, "gadget", "--n", "100")
    row = json.loads(out)[0]
    assert code == 0 and row["value"] <= 64.7


def test_config_error_exit_code(capsys):
    assert main(["run", "--algo", "bogus"]) == 2
    assert main(["psi-check", "--t-max", "6000"]) == 2
    assert main(["run", "--source", "adversary", "--m", "1000", "--T", "1000"]) == 2


def test_replay_detects_tampering(capsys, tmp_path):
    run(capsys, "run", "--source", "gadget", "--n", "5", "--out", str(tmp_path))
    rep = json.loads((tmp_path / "report.json").read_text())
    rep["transcript_digest"] = "csv:0"
    (tmp_path / "report.json").write_text(json.dumps(rep))
    code, _ = run(capsys, "replay", str(tmp_path))
    assert code == 1


def test_strict_certificate_failure(capsys, tmp_path):
    run(capsys, "run", "--source", "gadget", "--n", "5", "--out", str(tmp_path))
    duals = json.loads((tmp_path / "duals.json").read_text())
    duals["y_offline"] = [0.0] * len(duals["y_offline"])
    (tmp_path / "duals.json").write_text(json.dumps(duals))
    assert main(["certify", "--strict", str(tmp_path)]) == 3


def test_hardness_and_psi(capsys):
    code, out = run(capsys, "hardness", "--k", "4", "--trials", "500")
    d = json.loads(out)
    assert code == 0 and d["dp_value"] == d["closed_form"] == 1.875
    assert {"dp_value", "closed_form", "empirical_mean", "stderr"} <= set(d)
    code, out = run(capsys, "psi-check", "--t-max", "100", "--format", "csv")
    assert code == 0 and out.startswith("property,pass")


def test_round_and_sweep(capsys):
    code, out = run(capsys, "round", "--trials", "200")
    assert code == 0 and json.loads(out)["degree_ok"]
    code, out = run(capsys, "sweep", "--m", "5", "--T", "2,3", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 3
