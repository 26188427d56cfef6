import subprocess
import sys

from qbxlocal.cli import main
from qbxlocal.harness import CSV_HEADER

CONFIG = """
kernel = cauchy
geometry = starfish
geometry_params = [1, 0.3, 5]
density = cos
density_params = [3]
N = [2]
r = [2^-3, 2^-4, 2^-5]
M = [256]
q = 16
targets = [pi/10]
"""


def test_selftest_exits_zero(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 6


def test_missing_config_exits_one(tmp_path, capsys):
    missing = tmp_path / "absent.cfg"
    assert main(["sweep", "--config", str(missing), "--out", str(tmp_path / "x.csv")]) == 1
    assert str(missing) in capsys.readouterr().err


def test_unknown_flag_exits_one(capsys):
    assert main(["sweep", "--config", "a", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err


def test_bad_config_reports_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(CONFIG.replace("q = 16", "q = sixteen"))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 1
    err = capsys.readouterr().err
    assert "line 10" in err and "'q'" in err


def test_sweep_writes_header(tmp_path):
    cfg = tmp_path / "t1.cfg"
    cfg.write_text(CONFIG)
    out = tmp_path / "t1.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == CSV_HEADER
    assert len(lines) == 5
    assert all(line.endswith(",ok") for line in lines[2:])


def test_eval_prints_value(capsys):
    assert main(["eval", "--kernel", "cauchy", "--N", "3", "--r", "0.2", "--M", "32", "--q", "16",
                 "--target", "0.9", "--reference"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("value = ")
    err = float(out.split("abs_error = ")[1])
    assert err < 1e-10


def test_eval_validation_exit(capsys):
    assert main(["eval", "--kernel", "helmholtz_slp", "--k", "0"]) == 1
    assert main(["eval", "--kernel", "cauchy", "--geometry", "hexagon"]) == 1


def test_demo_bie(capsys):
    assert main(["demo-bie", "--data", "zpow:1"]) == 0
    out = capsys.readouterr().out
    assert float(out.split("=")[1].split()[0]) < 1e-6



def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qbxlocal.cli", "sweep", "--config", "/nonexistent"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 1
    assert "/nonexistent" in proc.stderr
