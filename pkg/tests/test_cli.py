import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from rmtlab.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def parse(text):
    header = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].partition("=")
            header[k.strip()] = v.strip()
        else:
            body.append(line)
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return header, rows


def test_equilibrium(capsys):
    code, out, _ = run(["equilibrium", "--potential", "quartic:1,-2", "--points", "11"], capsys)
    assert code == 0
    header, rows = parse(out)
    assert float(header["a"]) == pytest.approx(-2.0) and float(header["b"]) == pytest.approx(2.0)
    assert len(rows) == 11
    x = np.array([float(r["x"]) for r in rows])
    psi = np.array([float(r["psi_t"]) for r in rows])
    assert np.allclose(psi, x**2 * np.sqrt(np.maximum(4 - x**2, 0)) / (2 * math.pi), atol=1e-12)


def test_equilibrium_grid_outside_support(capsys):
    code, out, _ = run(["equilibrium", "--potential", "gaussian", "--grid=-3:3:7"], capsys)
    _, rows = parse(out)
    assert code == 0
    assert float(rows[0]["psi_t"]) == 0.0
    assert float(rows[0]["q_t"]) > 0


def test_kernel_finite_to_file(tmp_path, capsys):
    out = tmp_path / "k.csv"
    code, stdout, _ = run(
        ["kernel-finite", "--potential", "gaussian", "--n", "1", "--N", "2", "--grid", "0:0:1", "-o", str(out)],
        capsys,
    )
    assert code == 0 and stdout == ""
    header, rows = parse(out.read_text())
    assert float(header["N"]) == 2.0
    assert float(rows[0]["K"]) == pytest.approx(1 / math.sqrt(math.pi), abs=1e-14)


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("potential = gaussian\nn = 1\nN = 2\ngrid = 0:0:1\n")
    code, out, _ = run(["kernel-finite", "--config", str(cfg), "--N", "1"], capsys)
    header, rows = parse(out)
    assert code == 0
    assert float(header["N"]) == 1.0
    assert float(rows[0]["K"]) == pytest.approx((2 * math.pi) ** -0.5, abs=1e-14)


def test_painleve_table_and_psi(capsys):
    code, out, _ = run(["painleve"], capsys)
    header, rows = parse(out)
    assert code == 0
    q0 = [float(r["q"]) for r in rows if float(r["s"]) == 0.0]
    assert q0[0] == pytest.approx(0.3670615515, abs=1e-8)
    code, out, _ = run(["painleve", "--zeta", "0,1,-1", "--s", "0"], capsys)
    header, rows = parse(out)
    assert header["s"] == "0.0"
    assert float(rows[1]["phi1"]) == pytest.approx(float(rows[2]["phi1"]), abs=1e-8)
    assert float(rows[1]["phi2"]) == pytest.approx(-float(rows[2]["phi2"]), abs=1e-8)


@pytest.mark.parametrize("which, value", [("bulk", 1.0), ("edge", 0.25881940379280680**2)])
def test_kernel_limit_closed_forms(which, value, capsys):
    code, out, _ = run(["kernel-limit", "--which", which, "--grid", "0:0:1"], capsys)
    _, rows = parse(out)
    assert code == 0
    assert float(rows[0]["K"]) == pytest.approx(value, abs=1e-12)


def test_kernel_limit_crit_forms_agree(capsys):
    args = ["kernel-limit", "--grid=-1:1:3", "--s", "0.5", "--sigma-min", "-10"]
    _, ratio, _ = run(args + ["--which", "crit"], capsys)
    code, integral, _ = run(args + ["--which", "crit-integral"], capsys)
    assert code == 0
    header, rows_i = parse(integral)
    _, rows_r = parse(ratio)
    assert float(header["tail_bound"]) < 1e-6
    a = np.array([float(r["K"]) for r in rows_r])
    b = np.array([float(r["K"]) for r in rows_i])
    assert np.max(np.abs(a - b)) < 1e-6


def test_verify_commands(tmp_path, capsys):
    code, out, _ = run(["verify-bulk", "--n-list", "10,20", "--grid", "0 0; 0.5 0"], capsys)
    header, rows = parse(out)
    assert code == 0 and header["kind"] == "bulk" and len(rows) == 2
    code, out, _ = run(["verify-edge", "--n-list", "10", "--c-edge", "1", "--grid", "0 0", "--edge", "left"], capsys)
    header, rows = parse(out)
    assert code == 0 and header["kind"] == "edge-left" and header["c_edge"] == "1.0"
    cfg = tmp_path / "crit.cfg"
    cfg.write_text("potential = quartic-critical\nL = 1\nn_list = 10\ngrid = 0 0; 1 1\n")
    code, out, _ = run(["verify-critical", "--config", str(cfg)], capsys)
    header, rows = parse(out)
    assert code == 0
    assert float(header["c"]) == pytest.approx(0.25)
    assert float(header["s"]) == pytest.approx(2 ** (-1 / 3))
    assert [r["n"] for r in rows] == ["10"]


def test_errors_exit_with_status_2(tmp_path, capsys):
    code, out, err = run(["equilibrium", "--potential", "quartic:1"], capsys)
    assert code == 2 and out == "" and "rmtlab equilibrium" in err
    code, _, err = run(["equilibrium", "--config", str(tmp_path / "nope.cfg")], capsys)
    assert code == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    code, _, err = run(["painleve", "--config", str(bad)], capsys)
    assert code == 2 and "unknown key" in err


def test_console_script_version():
    res = subprocess.run([sys.executable, "-m", "rmtlab.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("rmtlab ")
