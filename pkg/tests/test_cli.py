import json

import pytest

from riser import cli
from riser import report as R


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_tau_csv(tmp_path, capsys):
    out = tmp_path / "tau.csv"
    code, _, _ = run(["tau", "--system", "s5", "--param", "e_max=3", "--param", "n_grid=50", "--out", str(out)], capsys)
    assert code == 0
    data = out.read_bytes()
    assert data.startswith(b"E,theta,tau\n") and data.endswith(b"\n") and b"\r" not in data
    rows = [list(map(float, line.split(","))) for line in data.decode().splitlines()[1:]]
    assert rows[0][0] == 0.1 and rows[-1][0] == 3.0
    assert all(b[0] > a[0] for a, b in zip(rows, rows[1:]))


def test_tau_peaks_report(tmp_path, capsys):
    peaks = tmp_path / "peaks.json"
    code, out, _ = run(["tau", "--system", "s4", "--param", "e_max=3", "--param", f"peaks_out={peaks}"], capsys)
    assert code == 0 and out.startswith("E,theta,tau\n")
    data = json.loads(peaks.read_text())
    assert len(data) == 1 and set(data[0]) == {"eps_n", "tau_max"}
    assert abs(data[0]["eps_n"] - 2.34) < 0.01


def test_psi_profile(capsys):
    code, out, _ = run(["psi", "--system", "s6.1", "--param", "energy=2.1263-0.2428i", "--param", "n_points=24"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,re_psi,im_psi,abs2_psi" and len(lines) == 25
    assert float(lines[1].split(",")[0]) == -15.0 and float(lines[-1].split(",")[0]) == 8.0


def test_poles_empty_for_exponential(capsys):
    code, out, _ = run(["poles", "--system", "s0.1"], capsys)
    assert code == 0 and out == "[]\n"


def test_poles_records(capsys):
    code, out, _ = run(["poles", "--system", "s4", "--param", "re_max=5", "--param", "nx=10"], capsys)
    assert code == 0
    recs = json.loads(out)
    assert [r["n"] for r in recs] == [0, 1]
    assert recs[0]["eps_n"] is not None and recs[0]["class"] == "resonance"
    assert abs(recs[0]["gamma"] + 2 * recs[0]["im"]) < 1e-15


def test_reflectivity(capsys):
    code, out, _ = run(["reflectivity", "--system", "s7.2", "--param", "n_grid=4"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "E,re_r,im_r,abs2_r" and len(lines) == 5
    assert all(abs(float(line.split(",")[3]) - 1) < 1e-6 for line in lines[1:])


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# unit circle\nsystem = s6.2\nn_grid = 3\ne_max = 2\n", encoding="utf-8")
    code, out, _ = run(["reflectivity", "--config", str(cfg)], capsys)
    assert code == 0 and len(out.splitlines()) == 4


@pytest.mark.parametrize("argv", [
    ["poles", "--system", "s9"],
    ["poles", "--system", "s1.1", "--param", "c=-1"],
    ["psi", "--system", "s4"],
    ["dance"],
    [],
    ["tau", "--system", "s4", "--param", "oops"],
    ["tau", "--config", "x.cfg", "--system", "s4"],
    ["tau", "--config", "/nonexistent/x.cfg"],
    ["psi", "--system", "s6.1", "--param", "energy=2", "--param", "x_min=-5000", "--param", "x_max=8000"],
    ["tau", "--system", "s3.2", "--param", "e_min=3"],
])
def test_usage_errors_exit_1(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 1 and out == "" and err.startswith("riser:")


def test_config_error_reports_location(capsys):
    code, _, err = run(["poles", "--system", "s1.1", "--param", "c=-1"], capsys)
    assert "line 2, column 5" in err and "invariant-violation" in err


def test_unwritable_output_exit_1(tmp_path, capsys):
    code, _, err = run(["poles", "--system", "s0.1", "--out", str(tmp_path / "no" / "x.json")], capsys)
    assert code == 1 and "No such file" in err


def test_physics_failure_exit_2(monkeypatch, capsys):
    failing = R.Table1Report([R.RowReport("s4", [{"pass": False}])], R.Tolerances())
    monkeypatch.setattr(R, "run_table1", lambda tol, region: failing)
    code, out, err = run(["table1"], capsys)
    assert code == 2 and json.loads(out)["pass"] is False and "s4" in err


def test_numerical_failure_exit_2(monkeypatch, capsys):
    from riser import poles as P

    def boom(*args, **kwargs):
        raise P.PhaseResolutionError("unresolved")

    monkeypatch.setattr(P, "find_resonances", boom)
    code, _, err = run(["poles", "--system", "s4"], capsys)
    assert code == 2 and "PhaseResolutionError" in err


def test_table1_success_exit_0(monkeypatch, capsys):
    passing = R.Table1Report([R.RowReport("s4", [{"pass": True}])], R.Tolerances())
    monkeypatch.setattr(R, "run_table1", lambda tol, region: passing)
    code, out, _ = run(["table1"], capsys)
    assert code == 0 and json.loads(out)["pass"] is True


@pytest.mark.parametrize("argv", [
    ["tau", "--system", "s6.2", "--param", "e_max=4", "--param", "n_grid=60"],
    ["poles", "--system", "s5", "--param", "re_max=4", "--param", "nx=8"],
    ["psi", "--system", "s6.1", "--param", "energy=2.1263-0.2428i", "--param", "n_points=50"],
    ["reflectivity", "--system", "s7.1", "--param", "n_grid=20"],
])
def test_byte_identical_reruns(argv, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_thread_cap_does_not_change_output(tmp_path, monkeypatch):
    argv = ["reflectivity", "--system", "s6.1", "--param", "n_grid=1200"]
    monkeypatch.setenv("RISER_THREADS", "1")
    assert cli.main(argv + ["--out", str(tmp_path / "one")]) == 0
    monkeypatch.setenv("RISER_THREADS", "3")
    assert cli.main(argv + ["--out", str(tmp_path / "three")]) == 0
    assert (tmp_path / "one").read_bytes() == (tmp_path / "three").read_bytes()


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "riser", "poles", "--system", "s0.1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "[]\n"
