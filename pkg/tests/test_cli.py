import json
import os
import subprocess
import sys

import pytest

from liquidyn.cli import main
from liquidyn.reference import GDP_GROWTH, INDICATORS, STRESS, data_path


def run(tmp_path, *argv, out="out"):
    code = main(["--out", str(tmp_path / out), *argv])
    return code, tmp_path / out


def _read(out):
    return json.loads((out / "report.json").read_text())


def test_balance_baseline(tmp_path, capsys):
    code, out = run(tmp_path, "balance")
    assert code == 0
    doc = _read(out)
    assert doc["balances"]["baseline"]["lhs"] == pytest.approx(1.5002, abs=1e-4)
    assert doc["balances"]["baseline"]["epsilon_required"] == pytest.approx(-0.4547, abs=1e-4)
    assert any("sign inconsistency" in w for w in doc["warnings"])
    assert "lhs = 1.5002" in capsys.readouterr().out


def test_balance_with_epsilon_and_override(tmp_path):
    code, out = run(tmp_path, "balance", "--epsilon", "-0.454698083")
    assert code == 0 and _read(out)["warnings"] == []
    code, out = run(tmp_path, "balance", "--set", "beta=1.6", out="o2")
    assert _read(out)["parameters"]["beta"] == 1.6


def test_derive_writes_params(tmp_path):
    params = tmp_path / "params.json"
    code, out = run(tmp_path, "derive", str(data_path(INDICATORS)), "-o", str(params))
    assert code == 0
    values = json.loads(params.read_text())
    assert values["rho"] == pytest.approx(0.7421, abs=1e-12)
    assert values["dv_dt"] == pytest.approx(-0.23, abs=1e-12)
    assert values["stickiness"] == pytest.approx(0.6606, abs=1e-15)
    code, out = run(tmp_path, "balance", "--params", str(params), out="b")
    assert _read(out)["balances"]["baseline"]["lhs"] == pytest.approx(1.5002, abs=1e-4)


def test_derive_with_gdp(tmp_path):
    code, out = run(tmp_path, "derive", str(data_path(INDICATORS)), "--gdp", str(data_path(GDP_GROWTH)))
    assert code == 0
    doc = _read(out)
    assert doc["parameters"]["cyclical_force"] > 0
    assert "gdp_transform" in doc["notes"]


def test_fourier(tmp_path):
    code, out = run(tmp_path, "fourier", str(data_path(GDP_GROWTH)), "-k", "3")
    assert code == 0
    doc = _read(out)
    assert len(doc["summary"]["components"]) == 3
    assert doc["summary"]["mean_impact"] > 0
    assert (out / "cyclical_force.dat").exists()
    assert (out / "detrended.dat").read_text().startswith("# time detrended\n2010 ")


def test_stress(tmp_path):
    code, out = run(tmp_path, "stress", str(data_path(STRESS)))
    assert code == 0
    res = _read(out)["balances"]["scenario"]
    assert res["lhs"] == pytest.approx(2.3039, abs=2e-4)
    assert res["rhs"] == pytest.approx(2.9297, abs=2e-4)
    assert res["imbalance"] == pytest.approx(0.6258, abs=2e-4)
    assert res["epsilon_required"] == pytest.approx(-0.1711, abs=2e-4)
    assert _read(out)["summary"]["indicators"] == {"velocity": 2.8}


def test_sensitivity(tmp_path):
    code, out = run(tmp_path, "--format", "table", "sensitivity", str(data_path(STRESS)))
    assert code == 0
    table = (out / "report.csv").read_text()
    assert "sensitivity,rows[0].target,shock" in table
    assert "sensitivity,rows[1].target,beta" in table


def test_simulate_seed_sources(tmp_path, monkeypatch):
    args = ["simulate", "--steps", "5", "--paths", "200", "--sigma", "0.5"]
    monkeypatch.setenv("LIQUIDYN_SEED", "11")
    _, env_out = run(tmp_path, *args, out="env")
    monkeypatch.delenv("LIQUIDYN_SEED")
    _, flag_out = run(tmp_path, *args, "--seed", "11", out="flag")
    _, global_out = run(tmp_path, "--seed", "11", *args, out="glob")
    _, other = run(tmp_path, *args, "--seed", "12", out="other")
    reports = [(d / "report.json").read_bytes() for d in (env_out, flag_out, global_out)]
    assert reports[0] == reports[1] == reports[2]
    assert (other / "report.json").read_bytes() != reports[0]
    assert _read(flag_out)["summary"]["seed"] == 11


def test_validation_exit_code(tmp_path, capsys):
    scn = tmp_path / "bad.scn"
    scn.write_text("gamma: 1 -> 2\n")
    code, _ = run(tmp_path, "stress", str(scn))
    assert code == 2
    assert "gamma" in capsys.readouterr().err
    code, _ = run(tmp_path, "balance", "--set", "rho=-1", out="o2")
    assert code == 2


def test_io_exit_code(tmp_path):
    code, _ = run(tmp_path, "stress", str(tmp_path / "missing.scn"))
    assert code == 3
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["--out", str(blocker / "sub"), "balance"]) == 3


def test_module_entry_point(tmp_path):
    env = {**os.environ, "LIQUIDYN_SEED": "3"}
    proc = subprocess.run([sys.executable, "-m", "liquidyn", "--out", str(tmp_path), "balance"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "report.json").exists()
