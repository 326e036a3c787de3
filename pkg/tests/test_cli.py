import csv
import json
import math
import subprocess
import sys

import pytest

from fbl_mimo import cli, identities, mc_lab
from fbl_mimo.errors import ConvergenceError
from fbl_mimo.mp_core import delta0


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- bounds ---------------------------------------------------------------------

def test_bounds_figure3_point(capsys):
    code, out, _ = run(capsys, "bounds", "--snr-db", "10", "--c", "0.5", "--beta", "10", "--r", "-3.1623")
    assert code == 0
    rec = json.loads(out)
    assert rec["pe_upper"] == pytest.approx(0.0859126, abs=1e-5)
    for k in ("capacity", "theta_minus", "theta_plus", "zeta0", "zeta1_lin", "zeta1_quad", "zeta2", "pe_lower", "pe_upper"):
        assert isinstance(rec[k], float)
    assert rec["manifest"]["command"] == "bounds"
    assert rec["manifest"]["parameters"]["c"] == 0.5


def test_bounds_zero_rate(capsys):
    code, out, _ = run(capsys, "bounds", "--snr-db", "0", "--c", "2", "--beta", "4", "--r", "0")
    rec = json.loads(out)
    assert code == 0 and rec["pe_lower"] == rec["pe_upper"] == 0.5


def test_bounds_missing_flag(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["bounds", "--snr-db", "10", "--beta", "10", "--r", "0"])
    out, err = capsys.readouterr()
    assert info.value.code == 2 and out == "" and "--c" in err


def test_bounds_invalid_value(capsys):
    code, out, err = run(capsys, "bounds", "--snr-db", "10", "--c", "-1", "--beta", "10", "--r", "0")
    assert code == 2 and out == "" and "c must be" in err


def test_bounds_quadrature_failure(capsys, monkeypatch):
    def fail(*a, **k):
        raise ConvergenceError("no luck", estimate=1.0, abserr=1.0)

    monkeypatch.setattr("fbl_mimo.second_order.tail_quadrature", fail)
    code, out, err = run(capsys, "bounds", "--snr-db", "10", "--c", "0.5", "--beta", "10", "--r", "-1")
    assert code == 3 and out == "" and "numerical" in err


# -- sweep ----------------------------------------------------------------------

def test_sweep_figure3(tmp_path, capsys):
    out = tmp_path / "f3.csv"
    code, _, _ = run(capsys, "sweep", "--figure", "3", "--out", str(out))
    assert code == 0
    rows = read_rows(out)
    assert list(rows[0]) == ["c", "beta", "upper", "lower", "limit", "error"]
    assert len(rows) == 63
    row = next(r for r in rows if r["c"] == "1" and abs(float(r["beta"]) - 50.118723) < 1e-5)
    assert float(row["upper"]) == pytest.approx(0.130253, abs=1e-5)
    man = json.loads((tmp_path / "f3.csv.manifest.json").read_text())
    assert man["command"] == "sweep" and man["parameters"]["figure"] == 3 and "duration_s" in man


def test_sweep_figure4(tmp_path, capsys):
    out = tmp_path / "f4.csv"
    assert run(capsys, "sweep", "--figure", "4", "--out", str(out))[0] == 0
    rows = read_rows(out)
    assert list(rows[0]) == ["snr_db", "n", "bound", "error"]
    row = next(r for r in rows if r["n"] == "144" and float(r["snr_db"]) == 0.0)
    assert float(row["bound"]) == pytest.approx(3.83389e-06, rel=1e-3)


def test_sweep_figure5_schema(tmp_path, capsys):
    out = tmp_path / "f5.csv"
    assert run(capsys, "sweep", "--figure", "5", "--out", str(out))[0] == 0
    rows = read_rows(out)
    assert list(rows[0]) == ["n_over_K", "finite_bound", "out_upper", "out_lower", "out_limit", "error"]
    assert rows[0]["n_over_K"] == "1" and rows[-1]["n_over_K"] == "32"
    row = next(r for r in rows if r["n_over_K"] == "10")
    assert float(row["out_upper"]) == pytest.approx(0.0015331, rel=1e-3)


def test_sweep_full_precision(tmp_path, capsys):
    out = tmp_path / "f4.csv"
    run(capsys, "sweep", "--figure", "4", "--out", str(out))
    v = read_rows(out)[5]["bound"]
    assert float(repr(float(v))) == float(v)
    assert len(v.replace(".", "").replace("-", "").split("e")[0].lstrip("0")) >= 16


def test_sweep_custom_single_point(tmp_path, capsys):
    out = tmp_path / "one.csv"
    code, _, _ = run(capsys, "sweep", "--kind", "snr", "--grid", "0", "--n", "36", "--out", str(out))
    lines = out.read_text().splitlines()
    assert code == 0 and len(lines) == 2
    assert float(lines[1].split(",")[2]) == pytest.approx(0.000918928, rel=1e-3)


def test_sweep_all_rows_fail(tmp_path, capsys):
    out = tmp_path / "bad.csv"
    code, _, _ = run(capsys, "sweep", "--kind", "snr", "--grid=-30,-20", "--rate", "20", "--out", str(out))
    rows = read_rows(out)
    assert code == 3 and all(r["error"] for r in rows) and rows[0]["bound"] == ""


def test_sweep_partial_failure_exits_zero(tmp_path, capsys):
    out = tmp_path / "mix.csv"
    code, _, _ = run(capsys, "sweep", "--kind", "blocklength", "--grid", "1.1,2", "--snr-db", "0", "--out", str(out))
    rows = read_rows(out)
    assert code == 0 and rows[0]["error"] and not rows[1]["error"]


def test_sweep_needs_grid(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--kind", "snr", "--out", str(tmp_path / "x.csv"))
    assert code == 2 and "--grid" in err


def test_sweep_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "sweep", "--figure", "5", "--out", str(a))
    run(capsys, "sweep", "--figure", "5", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


# -- simulate -------------------------------------------------------------------

SIM = ["simulate", "--nn", "4", "--k", "2", "--n", "8", "--snr-db", "0", "--trials", "100", "--seed", "7"]


def test_simulate_twice_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *SIM, "--out", str(a))[0] == 0
    assert run(capsys, *SIM, "--out", str(b), "--workers", "3")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.summary.json").read_bytes() == (tmp_path / "b.csv.summary.json").read_bytes()
    man = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert man["seed"] == 7 and man["parameters"]["trials"] == 100


def test_simulate_summary_schema(tmp_path, capsys):
    code, out, _ = run(capsys, *SIM, "--out", str(tmp_path / "s.csv"))
    summ = json.loads(out)
    for k in ("mean", "std", "ks", "theoretical_C", "theoretical_theta", "empirical_feinstein", "theorem2_bound", "mean_I", "std_I"):
        assert k in summ
    assert 0 <= summ["ks"] <= 1


def test_simulate_out_of_regime_is_null(tmp_path, capsys):
    code, out, _ = run(capsys, *SIM, "--rate", "30", "--out", str(tmp_path / "s.csv"))
    summ = json.loads(out)
    assert code == 0 and summ["theorem2_bound"] is None and "discriminant" in summ["theorem2_error"]


def test_simulate_qpsk_zero_spread(tmp_path, capsys):
    out = tmp_path / "q.csv"
    assert run(capsys, *SIM[:-4], "--trials", "30", "--seed", "1", "--input", "qpsk", "--out", str(out))[0] == 0
    assert {r["a"] for r in read_rows(out)} == {"0"}


def test_simulate_failure_exit_code(tmp_path, capsys, monkeypatch):
    def boom(config, i):
        raise FloatingPointError("bad")

    monkeypatch.setattr(mc_lab, "sample_information_density", boom)
    code, _, err = run(capsys, *SIM, "--out", str(tmp_path / "s.csv"))
    assert code == 4 and "trial 0" in err


# -- validate -------------------------------------------------------------------

def test_validate_passes(capsys):
    code, out, _ = run(capsys, "validate")
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert code == 0
    assert len(lines) >= 8 and all(l.startswith("PASS") for l in lines)


def test_validate_fault_injection(capsys):
    code, out, _ = run(capsys, "validate", "--inject-delta0-fault", "1e-6")
    assert code == 1
    assert any(l.startswith("FAIL") and "quadratic residual" in l for l in out.splitlines())


def test_fault_flag_hidden(capsys):
    with pytest.raises(SystemExit):
        cli.main(["validate", "--help"])
    assert "inject" not in capsys.readouterr().out


def test_identity_suite_detects_each_perturbation():
    # the suite must catch a relative perturbation of delta0 as well
    results = identities.run_identities(lambda x, c: delta0(x, c) * (1 + 1e-7))
    assert not all(r.passed for r in results)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "fbl_mimo", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("fbl-mimo")
