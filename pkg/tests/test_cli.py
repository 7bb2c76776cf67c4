import subprocess
import sys

import numpy as np
import pytest

from grover_michelson.cli import run
from grover_michelson.metrics import SweepSpec, max_slope, sweep, visibility


def test_coin_prints_grover_matrix(capsys):
    assert run(["coin", "--theta1", "0", "--theta2", "0", "--theta", "0"]) == 0
    rows = [[complex(c) for c in line.split(",")] for line in capsys.readouterr().out.splitlines()]
    expected = 0.5 * np.array([[-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1], [1, 1, 1, -1]])
    np.testing.assert_allclose(np.array(rows), expected, atol=1e-12)


def test_coin_compose_imbalanced(capsys):
    assert run(["coin", "--compose", "--bs1-r", "0.48", "--bs2-r", "0.48"]) == 0
    rows = [[complex(c) for c in line.split(",")] for line in capsys.readouterr().out.splitlines()]
    assert np.abs(rows[0][0]) ** 2 == pytest.approx(0.48**2, abs=1e-11)


def test_sweep_five_points(capsys):
    argv = ["sweep", "--phi2", "3.14159", "--theta", "0", "--points", "5", "--from", "0", "--to", "6.28318"]
    assert run(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "phi1,R,T" and len(lines) == 6
    phi1, R, T = map(float, lines[1].split(","))
    assert phi1 == 0.0 and R == pytest.approx(1.0, abs=1e-9)


def test_sweep_single_point(capsys):
    assert run(["sweep", "--phi2", "3.141592653589793", "--phi1", "1.5707963267948966"]) == 0
    _, row = capsys.readouterr().out.splitlines()
    assert float(row.split(",")[1]) == pytest.approx(0.2, abs=1e-11)


def test_sweep_output_is_deterministic(capsys):
    argv = ["sweep", "--phi2", "0.37", "--points", "301", "--model", "steady_state", "--theta", "0.4"]
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first


def test_sweep_then_metrics_matches_in_process(tmp_path, capsys):
    path = tmp_path / "curve.csv"
    assert run(["sweep", "--phi2", "0.5", "--output", str(path)]) == 0
    assert run(["metrics", "--input", str(path)]) == 0
    out = dict(line.split("=") for line in capsys.readouterr().out.splitlines())
    curve = sweep(SweepSpec(0.5))
    assert float(out["visibility"]) == pytest.approx(visibility(curve), abs=1e-9)
    assert float(out["max_slope"]) == pytest.approx(max_slope(curve)[0], abs=1e-9)
    assert int(out["samples"]) == 2001


def test_compare_report(capsys):
    assert run(["compare", "--phi2", "0.3", "--delta-phi", "1e-3"]) == 0
    out = dict(line.split("=") for line in capsys.readouterr().out.splitlines())
    assert float(out["michelson_max_slope"]) == pytest.approx(0.5, abs=1e-6)
    assert float(out["intensity_ratio"]) > 12


def test_compare_nonzero_theta_uses_numeric_model(capsys):
    assert run(["compare", "--phi2", "0.5", "--theta", "0.7", "--points", "401"]) == 0
    assert "gmi_max_slope=" in capsys.readouterr().out


def test_calibrate_measured_file(data_dir, capsys):
    assert run(["calibrate", "--measured", str(data_dir / "coin_measured.csv")]) == 0
    out = dict(line.split("=") for line in capsys.readouterr().out.splitlines())
    assert 0.44 <= float(out["bs1_reflectance"]) <= 0.56


def test_calibrate_unphysical_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("0.3,0.3,0.3,0.3\n" * 4)
    assert run(["calibrate", "--measured", str(path)]) == 1
    assert "non-physical" in capsys.readouterr().err


def test_verify_passes(capsys):
    assert run(["verify", "--grid", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert all(line.startswith("PASS") for line in lines[:-1])


@pytest.mark.parametrize(
    "argv,code",
    [
        (["sweep", "--phi2", "0", "--phi1", "0", "--model", "steady_state"], 2),
        (["sweep", "--phi2", "0", "--from", "-1", "--to", "1", "--points", "5", "--model", "steady_state"], 2),
        (["sweep", "--phi2", "1", "--unknown"], 1),
        (["sweep", "--phi2", "1", "--theta", "0.3"], 1),
        (["sweep", "--phi2", "1", "--points", "2"], 1),
        (["metrics", "--input", "/nonexistent/curve.csv"], 1),
        (["frobnicate"], 1),
        ([], 1),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert run(argv) == code
    err = capsys.readouterr().err
    assert err


def test_resonance_message_names_phases(capsys):
    run(["sweep", "--phi2", "0", "--phi1", "0", "--model", "steady_state"])
    assert "phi1=0" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "grover_michelson", "coin"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.count("\n") == 4
