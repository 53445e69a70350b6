from __future__ import annotations

import json
import subprocess
import sys

import pytest

from pstqec.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main

PAIR_CODE = """# name: pair
# layout: check
1 1
"""


def run_json(capsys, argv):
    status = main(argv)
    return status, json.loads(capsys.readouterr().out)


def test_code_verify_ok(capsys):
    status, out = run_json(capsys, ["code", "verify", "steane-7"])
    assert status == EXIT_OK
    assert out["report"]["d1"] == 3 and out["mismatches"] == {}


def test_code_verify_mismatch(capsys):
    status, out = run_json(capsys, ["code", "verify", "css-15"])
    assert status == EXIT_VERIFY
    assert out["mismatches"]["d1"] == {"claimed": 5, "computed": 6}


def test_code_verify_missing_file(capsys):
    assert main(["code", "verify", "/nonexistent/code.txt"]) == EXIT_USAGE


def test_code_verify_custom_file(tmp_path, capsys):
    # H1 = G2 = [1 1] on two qubits: X1X2 and Z1Z2 commute, so it is valid
    p = tmp_path / "pair.txt"
    p.write_text(PAIR_CODE)
    status, out = run_json(capsys, ["code", "verify", str(p)])
    assert out["report"]["symplectic_valid"]
    assert status == EXIT_OK


def test_code_verify_anticommuting(tmp_path, capsys):
    p = tmp_path / "anti.txt"
    p.write_text("# layout: check\n1 0\n")
    status, out = run_json(capsys, ["code", "verify", str(p)])
    assert status == EXIT_VERIFY
    assert not out["report"]["symplectic_valid"]


def test_code_search(capsys):
    status, out = run_json(capsys, ["code", "search", "--m", "7", "--d1", "3", "--d2", "3", "--case", "ii"])
    assert status == EXIT_OK and out["found"]
    status, out = run_json(capsys, ["code", "search", "--m", "5", "--d1", "5", "--d2", "3", "--budget", "200"])
    assert status == EXIT_VERIFY and not out["found"]


def test_chain_check_manifest(tmp_path, capsys):
    out = tmp_path / "chain.json"
    assert main(["chain", "check", "--n", "8", "--out", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["pst_max_deviation"] < 1e-10
    man = json.loads((tmp_path / "chain.json.manifest.json").read_text())
    assert man["command"][:3] == ["pstqec", "chain", "check"]
    assert set(man) >= {"seed", "tolerances", "checksums", "version", "threads", "timestamp"}


def test_chain_check_breach(capsys):
    assert main(["chain", "check", "--n", "8", "--tol", "-1"]) == EXIT_NUMERIC


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["chain", "check", "--n", "notanint"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == EXIT_USAGE


def test_simulate_single_error(capsys):
    status = main(["simulate", "dephasing", "--n", "8", "--single-error", "8,1t0"])
    lines = capsys.readouterr().out.splitlines()
    assert status == EXIT_OK
    assert lines[0] == "site,t,pauli,f_encoded,f_unencoded,decode_failure_rate"
    fields = lines[1].split(",")
    assert float(fields[3]) == pytest.approx(1.0, abs=1e-12)
    assert float(fields[4]) == pytest.approx(1 / 3, abs=1e-12)


def test_simulate_rejects_small_chain():
    assert main(["simulate", "dephasing", "--n", "5", "--gamma", "0.1"]) == EXIT_USAGE


def test_simulate_bad_site():
    assert main(["simulate", "dephasing", "--n", "8", "--single-error", "12,0.5t0"]) == EXIT_USAGE


def test_wmatrix_report(capsys):
    status, out = run_json(capsys, ["impossibility", "wmatrix", "--n", "12", "--m", "7"])
    assert status == EXIT_OK
    assert out["unit_singular_values"] == 2
    assert main(["impossibility", "wmatrix", "--n", "11", "--m", "3"]) == EXIT_USAGE


def test_repetition_cli(capsys):
    status, out = run_json(capsys, ["impossibility", "repetition", "--n", "9", "--rep", "3"])
    assert status == EXIT_OK
    assert 0 <= out["error_probability"] <= 1


def test_deterministic_outputs(tmp_path):
    paths = [tmp_path / f"run{i}.csv" for i in range(2)]
    for p in paths:
        argv = ["simulate", "dephasing", "--n", "8", "--gamma", "0.05", "--steps", "8", "--out", str(p)]
        assert main(argv) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "pstqec.cli", "code", "verify", "steane-7"], capture_output=True, text=True)
    assert r.returncode == EXIT_OK
    assert json.loads(r.stdout)["report"]["case"] == "ii"
