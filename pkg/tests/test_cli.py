import csv
import io
import json
import subprocess
import sys

import pytest

from crspectra import cli
from crspectra.errors import DomainError


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_csv_example(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "3", "--gamma", "1", "--kappa", "0,0,0", "--jmax", "4",
                       "--format", "csv")
    assert code == cli.EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5
    assert float(rows[0]["energy"]) == -0.03125
    assert [int(r["degeneracy"]) for r in rows] == [1, 1, 3, 3, 6]
    assert all(r["method"] == "formula" for r in rows)
    # 17 significant digits round-trip
    assert float(rows[1]["energy"]) == -1 / (2 * 5 ** 2)


def test_scatter_all_example(capsys):
    code, out, _ = run(capsys, "scatter", "--n", "2", "--gamma", "1", "--p", "1", "--in", "0.6,0.8",
                       "--out", "1,0", "--method", "all", "--format", "json", "--no-timing")
    assert code == cli.EXIT_OK
    rep = json.loads(out)
    assert [r["method"] for r in rep["rows"]] == ["partial_wave", "closed_k0", "integral"]
    assert rep["pass"] and len(rep["checks"]) == 3


def test_scatter_interior(capsys):
    code, out, _ = run(capsys, "scatter", "--n", "2", "--p", "1", "--in", "0.6,0.8", "--out", "0.96,0.28",
                       "--format", "json", "--no-timing")
    assert code == cli.EXIT_OK
    assert all(c["pass"] for c in json.loads(out)["checks"])


def test_verify_commutators_example(capsys, tmp_path):
    out_path = tmp_path / "comm.json"
    code, out, _ = run(capsys, "verify", "commutators", "--n", "2", "--gamma", "1", "--kappa", "1,1",
                       "--orders", "2,4,6", "--format", "json", "-o", str(out_path))
    assert code == cli.EXIT_OK
    rep = json.loads(out_path.read_text())
    assert rep["pass"]
    assert any(c["name"].startswith("order [H, J_1(quartic)]") for c in rep["checks"])
    assert any(c["name"].startswith("control") for c in rep["checks"])
    assert (tmp_path / "comm.dat").exists() and (tmp_path / "comm.png").exists()


def test_json_schema(capsys):
    code, out, _ = run(capsys, "verify", "orthonormality", "--n", "2", "--kappa", "0,0", "--format", "json")
    rep = json.loads(out)
    assert {"command", "params", "checks", "pass", "wall_ms"} <= set(rep)
    for c in rep["checks"]:
        assert {"name", "measured", "expected", "tol", "pass", "method"} <= set(c)
    assert rep["pass"] == all(c["pass"] for c in rep["checks"])
    assert code == cli.EXIT_OK


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "spectrum", "--n", "2", "--kappa", "1")[0] == cli.EXIT_USAGE
    assert run(capsys, "bogus")[0] == cli.EXIT_USAGE
    assert run(capsys, "scatter", "--n", "2", "--p", "1", "--in", "0.6,0.8")[0] == cli.EXIT_USAGE
    assert run(capsys, "scatter", "--n", "2", "--p", "1", "--in", "0.6,0.8", "--out", "0.6,0.8")[0] == cli.EXIT_USAGE
    code, _, err = run(capsys, "spectrum", "--jmax", "x")
    assert code == cli.EXIT_USAGE and "usage" in err


def test_numeric_failure_exit_2(capsys):
    # an impossible tolerance fails the check but not the run
    code, out, _ = run(capsys, "verify", "orthonormality", "--n", "2", "--tol", "1e-30", "--format", "json")
    assert code == cli.EXIT_NUMERIC
    assert not json.loads(out)["pass"]


def test_printed_variant_exit_2(capsys):
    code, _, _ = run(capsys, "verify", "commutators", "--n", "3", "--kappa", "1,0,2", "--orders", "4",
                     "--fields", "1", "--variant", "printed")
    assert code == cli.EXIT_NUMERIC


def test_config_file_and_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 3, "gamma": 2.0, "kappa": [0, 0, 0], "jmax": 2, "format": "csv"}))
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 3 and float(rows[0]["energy"]) == pytest.approx(-4 / 32)
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--gamma", "1")
    assert float(list(csv.DictReader(io.StringIO(out)))[0]["energy"]) == -0.03125


def test_config_supplies_scatter_directions(capsys, tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"n": 2, "p": 1.0, "in": [0.6, 0.8], "out": [0.96, 0.28], "method": "closed_k0"}))
    code, out, _ = run(capsys, "scatter", "--config", str(cfg), "--format", "json")
    assert code == 0 and json.loads(out)["rows"][0]["method"] == "closed_k0"


def test_deterministic_output(capsys):
    argv = ["scatter", "--n", "2", "--p", "1", "--in", "0.6,0.8", "--out", "0.96,0.28", "--format", "json",
            "--no-timing"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b
    argv = ["spectrum", "--n", "2", "--format", "csv"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_plot_data_spectrum(capsys, tmp_path):
    path = tmp_path / "spec.dat"
    code, _, _ = run(capsys, "spectrum", "--n", "2", "--jmax", "6", "--plot-data", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "# j energy"
    energies = [float(l.split()[1]) for l in lines[1:]]
    assert len(energies) == 7 and all(b > a for a, b in zip(energies, energies[1:]))
    assert (tmp_path / "spec.png").stat().st_size > 1000


def test_plot_data_sweep(capsys, tmp_path):
    path = tmp_path / "sweep.dat"
    code, _, _ = run(capsys, "scatter", "--n", "2", "--p", "1", "--in", "0.6,0.8", "--out", "0.96,0.28",
                     "--method", "closed_k0", "--sweep", "12", "--plot-data", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#") and len(lines[0].split()) == 3
    assert len(lines) == 13


def test_emit_plot_data_empty(tmp_path):
    path = tmp_path / "nothing.dat"
    with pytest.raises(DomainError):
        cli.emit_plot_data([], path)
    with pytest.raises(DomainError):
        cli.emit_plot_data({"x": []}, path)
    assert not path.exists()


def test_emit_plot_data_rows(tmp_path):
    path = cli.emit_plot_data([{"theta": 0.1, "sigma": 2.0}, {"theta": 0.2, "sigma": 1.5}], tmp_path / "x.dat")
    assert path.read_text() == "# theta sigma\n0.10000000000000001 2\n0.20000000000000001 1.5\n"


def test_fmt():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert float(cli.fmt(1 / 3)) == 1 / 3
    assert cli.fmt(True) == "true" and cli.fmt(None) == ""


def test_states_and_wavefn(capsys):
    code, out, _ = run(capsys, "states", "--n", "3", "--j", "2", "--format", "csv")
    assert code == 0 and len(list(csv.DictReader(io.StringIO(out)))) == 3
    code, out, _ = run(capsys, "wavefn", "--n", "2", "--kappa", "1,0", "--j", "3", "--l", "1", "--format", "json")
    assert code == 0 and json.loads(out)["pass"]


def test_human_format(capsys):
    code, out, _ = run(capsys, "verify", "oracle", "--n", "2")
    assert code == 0
    assert "phase convention" in out and "exp(-2i delta)" in out and "overall: PASS" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "crspectra", "spectrum", "--n", "1", "--jmax", "0",
                           "--format", "csv"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "-0.5" in proc.stdout
