"""Command-line interface: exit codes, formats, determinism."""
import json
import math
import subprocess
import sys

import numpy as np
from rtl.cli import main
from rtl.jsonio import dumps, observable_to_json, state_to_json
from rtl.qcore import Observable, State


def run_cli(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_scenario_json_and_exit_zero(capsys):
    code, out, _ = run_cli(capsys, "scenario", "spin-x",
                           "--hbar-omega", "1", "--eps", "0.01")
    assert code == 0
    doc = json.loads(out)
    assert doc["all_pass"] is True
    vals = [b["value"] for b in doc["bounds"]
            if b["theorem"] == "projective-measurement-energy"]
    assert abs(vals[0] - 10.5) < 1e-9


def test_unknown_scenario_exit_2(capsys):
    code, _, err = run_cli(capsys, "scenario", "bogus")
    assert code == 2
    assert "unknown scenario" in err


def test_unknown_bound_exit_2(capsys):
    code, _, _ = run_cli(capsys, "bound", "bogus")
    assert code == 2


def test_sweep_csv_format(capsys):
    code, out, _ = run_cli(capsys, "sweep", "spin-x", "--eps-from", "0.001",
                           "--eps-to", "0.1", "--points", "3",
                           "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "epsilon,bound,flag"
    assert len(lines) == 4
    eps0, bound0, flag0 = lines[1].split(",")
    assert float(eps0) == 0.001
    assert flag0 in ("ok", "vacuous", "divergent")


def test_sweep_rejects_zero_start(capsys):
    code, _, err = run_cli(capsys, "sweep", "spin-x", "--eps-from", "0",
                           "--eps-to", "0.1")
    assert code == 2
    assert "diverge" in err


def test_sweep_rejects_non_sweepable(capsys):
    code, _, _ = run_cli(capsys, "sweep", "rni-energy", "--eps-from", "0.01",
                         "--eps-to", "0.1")
    assert code == 2


def test_csv_scenario_without_sweep_rejected(capsys):
    code, _, _ = run_cli(capsys, "scenario", "spin-x", "--format", "csv")
    assert code == 2


def test_measure_magic(tmp_path, capsys):
    t = np.array([1, np.exp(1j * math.pi / 4)]) / math.sqrt(2)
    f = tmp_path / "t.json"
    f.write_text(dumps(state_to_json(State(np.outer(t, t.conj())))))
    code, out, _ = run_cli(capsys, "measure", "--state", str(f),
                           "--kind", "magic")
    assert code == 0
    doc = json.loads(out)
    assert doc["unit"] == "bits"
    assert abs(doc["value"] - math.log2(4 - 2 * math.sqrt(2))) < 1e-6


def test_measure_energy_requires_hamiltonian(tmp_path, capsys):
    f = tmp_path / "s.json"
    f.write_text(dumps(state_to_json(State(np.eye(2) / 2))))
    code, _, err = run_cli(capsys, "measure", "--state", str(f),
                           "--kind", "energy")
    assert code == 2
    assert "hamiltonian" in err.lower()


def test_measure_energy_value(tmp_path, capsys):
    sf = tmp_path / "s.json"
    sf.write_text(dumps(state_to_json(State.from_vector([1, 1]))))
    hf = tmp_path / "h.json"
    hf.write_text(dumps(observable_to_json(Observable(np.diag([0.0, 1.0])))))
    code, out, _ = run_cli(capsys, "measure", "--state", str(sf),
                           "--kind", "energy", "--hamiltonian", str(hf))
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["value"] - 0.5) < 1e-12
    assert doc["unit"] == "nats"


def test_measure_bad_state_file(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text("{\"nope\": 1}")
    code, _, _ = run_cli(capsys, "measure", "--state", str(f),
                         "--kind", "coherence")
    assert code == 2


def test_bound_simplified(capsys):
    code, out, _ = run_cli(capsys, "bound", "simplified", "--gap", "2",
                           "--k", "1", "--error", "0.01", "--c-max", "0.5")
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["value"] - 22.4375) < 1e-12


def test_bound_divergent_json(capsys):
    code, out, _ = run_cli(capsys, "bound", "simplified", "--gap", "2",
                           "--k", "1", "--error", "0")
    assert code == 0
    assert json.loads(out)["value"] == "divergent"


def test_bound_missing_argument_exit_2(capsys):
    code, _, _ = run_cli(capsys, "bound", "simplified", "--gap", "2")
    assert code == 2


def test_selftest_small_budget(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--budget", "0.02")
    assert code == 0
    lines = [ln for ln in out.strip().split("\n") if ln.startswith("pass")]
    assert len(lines) == 4


def test_selftest_forced_failure(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--budget", "0.02",
                           "--force-failure")
    assert code == 1
    assert "fail" in out


def test_output_file(tmp_path, capsys):
    f = tmp_path / "out.json"
    code, out, _ = run_cli(capsys, "scenario", "rni-energy", "--out", str(f))
    assert code == 0
    assert out == ""
    assert json.loads(f.read_text())["all_pass"] is True


def test_byte_identical_reruns(capsys):
    _, out1, _ = run_cli(capsys, "scenario", "way-coherence", "--seed", "3")
    _, out2, _ = run_cli(capsys, "scenario", "way-coherence", "--seed", "3")
    assert out1 == out2


def test_env_seed_override(capsys, monkeypatch):
    monkeypatch.setenv("RTL_SEED", "9")
    _, out, _ = run_cli(capsys, "scenario", "rni-energy")
    assert json.loads(out)["parameters"]["seed"] == 9
    # explicit flag beats the environment
    _, out2, _ = run_cli(capsys, "scenario", "rni-energy", "--seed", "4")
    assert json.loads(out2)["parameters"]["seed"] == 4


def test_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "rtl.cli", "bound", "simplified", "--gap",
         "1", "--k", "1", "--error", "0.1"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["theorem"] == "simplified-tradeoff"
