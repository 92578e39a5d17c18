"""Command-line interface: output contracts and exit codes.

Everything runs in-process through main(argv) for speed; one subprocess
smoke test at the end proves the installed entry point works.
"""

import subprocess
import sys

import pytest

from twintbank.cli import main

DIVIDER = "R1 in out 1k\nR2 out 0 1k\n.in in\n.out out\n"
HEADER = "f_hz,mag_db,phase_deg,re,im"


@pytest.fixture()
def divider_net(tmp_path):
    path = tmp_path / "divider.net"
    path.write_text(DIVIDER)
    return str(path)


def test_tf_prints_coefficients_and_roots(divider_net, capsys):
    assert main(["tf", "--netlist", divider_net]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "sign: +1"
    assert out[1].endswith(": 0.5")
    assert out[2].endswith(": 1")
    assert out[3] == "zeros: (none)"
    assert out[4] == "poles: (none)"


def test_tf_prints_sorted_poles(tmp_path, capsys):
    net = tmp_path / "rc2.net"
    net.write_text("R1 in a 1\nC1 a 0 1\nR2 a b 1\nC2 b 0 1\n.in in\n.out b\n")
    assert main(["tf", "--netlist", str(net)]) == 0
    out = capsys.readouterr().out.splitlines()
    # s**2 + 3s + 1 has roots at -(3 +/- sqrt(5))/2, ascending order.
    assert out[4] == "poles: -2.61803+0j, -0.381966+0j"


def test_sweep_divider_rows_and_flat_magnitude(divider_net, capsys):
    assert main(["sweep", "--netlist", divider_net,
                 "--fmin", "1", "--fmax", "10", "--points", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 4
    for row in lines[1:]:
        mag = float(row.split(",")[1])
        assert mag == pytest.approx(-6.0206, abs=1e-3)
    # Log-spaced, endpoints inclusive.
    f = [float(r.split(",")[0]) for r in lines[1:]]
    assert f[0] == 1.0 and f[-1] == 10.0
    assert f[1] == pytest.approx(10 ** 0.5, rel=1e-7)


def test_sweep_linear_grid(divider_net, capsys):
    assert main(["sweep", "--netlist", divider_net, "--linear",
                 "--fmin", "10", "--fmax", "30", "--points", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    f = [float(r.split(",")[0]) for r in lines[1:]]
    assert f == [10.0, 20.0, 30.0]


def test_sweep_writes_identical_bytes_to_file(divider_net, tmp_path, capsys):
    out_path = tmp_path / "sweep.csv"
    argv = ["sweep", "--netlist", divider_net, "--points", "11"]
    assert main(argv) == 0
    stdout_text = capsys.readouterr().out
    assert main(argv + ["--out", str(out_path)]) == 0
    assert out_path.read_bytes().decode() == stdout_text


def test_sweep_band_peaks_at_the_band(capsys):
    assert main(["sweep", "--band", "700", "--fmin", "300", "--fmax", "1600",
                 "--points", "201"]) == 0
    lines = capsys.readouterr().out.splitlines()[1:]
    assert len(lines) == 201
    best = max(lines, key=lambda r: float(r.split(",")[1]))
    assert float(best.split(",")[0]) == pytest.approx(700.0, rel=0.02)
    assert float(best.split(",")[1]) == pytest.approx(6.5, abs=0.05)


def test_sweep_channel_runs_the_default_bank(capsys):
    assert main(["sweep", "--channel", "0", "--points", "10"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == HEADER and len(lines) == 11


def test_calibrate_single_band_report(capsys):
    assert main(["calibrate", "--band", "200"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split() == ["band_hz", "r2_kohm", "r3_kohm", "q",
                              "f_peak_hz", "gain_db", "iters"]
    fields = out[1].split()
    assert float(fields[0]) == 200.0
    assert float(fields[1]) == pytest.approx(93.0, rel=0.02)
    assert float(fields[2]) == pytest.approx(13.98, rel=0.02)
    assert float(fields[3]) == pytest.approx(4.522, rel=0.02)
    assert float(fields[4]) == pytest.approx(200.0, abs=0.05)
    assert float(fields[5]) == pytest.approx(6.5, abs=0.001)


def test_calibrate_full_report_shape(capsys):
    assert main(["calibrate"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 9
    assert [r.split()[0] for r in out[1:]] == [
        "200.0", "350.0", "500.0", "700.0", "1000.0", "1400.0",
        "2000.0", "3200.0"]


def test_table1_rows_and_footnote(capsys):
    assert main(["table1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 10  # header + 8 bands + footnote
    row200 = out[1].split()
    assert row200[0] == "200.0"
    assert float(row200[2]) == pytest.approx(89.8)
    assert abs(float(row200[3])) <= 0.5
    assert out[9].startswith("*") and "3500" in out[9]
    assert out[8].endswith("*")  # the 3200 row carries the marker


def test_sum_writes_csv_and_prints_ripple(tmp_path, capsys):
    out_csv = tmp_path / "sum.csv"
    assert main(["sum", "--out", str(out_csv)]) == 0
    stdout = capsys.readouterr().out
    assert stdout.startswith("ripple_db[200..3200 Hz] = ")
    default_ripple = float(stdout.rsplit("=", 1)[1])
    lines = out_csv.read_text().splitlines()
    assert lines[0] == HEADER and len(lines) == 502

    assert main(["sum", "--inversions", "none", "--out", str(out_csv)]) == 0
    none_ripple = float(capsys.readouterr().out.rsplit("=", 1)[1])
    assert default_ripple < none_ripple


def test_sum_to_stdout_marks_the_ripple_as_a_comment(capsys):
    assert main(["sum", "--points", "51"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 53
    assert lines[-1].startswith("# ripple_db")


def test_sum_explicit_inversion_list(capsys):
    assert main(["sum", "--inversions", "1,3,5,7,9", "--points", "51"]) == 0
    with_list = capsys.readouterr().out
    assert main(["sum", "--points", "51"]) == 0
    assert capsys.readouterr().out == with_list


def test_flag_errors_exit_2(divider_net, capsys):
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["sweep"]) == 2  # no source
    assert main(["sweep", "--netlist", divider_net, "--band", "700"]) == 2
    assert main(["sweep", "--netlist", divider_net, "--points", "1"]) == 2
    assert main(["sweep", "--band", "123"]) == 2
    assert main(["sweep", "--channel", "11"]) == 2
    assert main(["calibrate", "--band", "nope"]) == 2
    assert main(["sum", "--inversions", "1,zap"]) == 2
    assert main(["sweep", "--netlist", divider_net,
                 "--fmin", "100", "--fmax", "50"]) == 2
    capsys.readouterr()  # swallow argparse noise


def test_computation_errors_exit_1(tmp_path, capsys):
    assert main(["tf", "--netlist", str(tmp_path / "missing.net")]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error: ")

    bad = tmp_path / "bad.net"
    bad.write_text("R1 in out zork\n.in in\n.out out\n")
    assert main(["tf", "--netlist", str(bad)]) == 1
    assert "bad value" in capsys.readouterr().err


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "subcommand" not in capsys.readouterr().err


def test_installed_entry_point_subprocess(divider_net):
    proc = subprocess.run(
        [sys.executable, "-m", "twintbank", "sweep", "--netlist", divider_net,
         "--fmin", "1", "--fmax", "10", "--points", "3"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    lines = proc.stdout.splitlines()
    assert lines[0] == HEADER and len(lines) == 4
