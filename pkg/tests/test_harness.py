import math
from dataclasses import astuple, replace
from itertools import pairwise

import numpy as np
import pytest

from qbxlocal.config import config_from_text, load_config, parse_number
from qbxlocal.errors import ConfigError, InsufficientDataError, ValidationError
from qbxlocal.harness import (
    CSV_HEADER,
    SweepRecord,
    fit_order,
    parse_csv,
    read_csv,
    records_to_csv,
    run_sweep,
    write_csv,
)

TRIVIAL = """
kernel = cauchy
geometry = circle
geometry_params = [1]
density = constant
N = [2]
r = [0.1]
M = [32]
q = 8
targets = [0.3]
"""

HELMHOLTZ_4H = """
# modal density on the unit circle, r tied to the panel length
kernel = helmholtz_slp
k = 2
geometry = circle
geometry_params = [1]
density = exp
density_params = [3]
N = [4]
coupling = r_equals_4h
M = [16, 32, 64, 128]
q = 8
targets = [0.4]
"""


def same(a, b):
    """Record equality that treats NaN fields as equal."""
    return len(a) == len(b) and all(
        x == y or (isinstance(x, float) and math.isnan(x) and math.isnan(y))
        for ra, rb in zip(a, b) for x, y in zip(astuple(ra), astuple(rb)))


def test_parse_number_forms():
    assert parse_number("2^-3") == 0.125
    assert parse_number("pi") == math.pi
    assert parse_number("0.5*pi") == 0.5 * math.pi
    assert parse_number("pi/10") == pytest.approx(math.pi / 10)
    with pytest.raises(ConfigError):
        parse_number("two")


@pytest.mark.parametrize("text, line, field", [
    (TRIVIAL + "N = [3]\n", 11, "N"),
    (TRIVIAL.replace("q = 8", "q = eight"), 9, "q"),
    (TRIVIAL.replace("r = [0.1]", "r = []"), 7, "r"),
    (TRIVIAL + "colour = red\n", 11, "colour"),
    (TRIVIAL.replace("M = [32]", "M = [32, 0]"), 8, "M"),
    (TRIVIAL + "coupling = r_equals_4h\n", 7, "r"),
    (TRIVIAL + "coupling = r_equals_h\n", 11, "coupling"),
    (TRIVIAL + "side = above\n", 11, "side"),
    (TRIVIAL + "just some words\n", 11, None),
])
def test_config_errors_carry_line_and_field(text, line, field):
    with pytest.raises(ConfigError) as info:
        config_from_text(text)
    assert info.value.line == line
    assert info.value.field == field


def test_missing_required_key():
    with pytest.raises(ConfigError) as info:
        config_from_text(TRIVIAL.replace("targets = [0.3]", ""))
    assert info.value.field == "targets"


def test_missing_file_names_path(tmp_path):
    path = tmp_path / "nope.cfg"
    with pytest.raises(ConfigError, match="nope.cfg"):
        load_config(path)


def test_trivial_sweep():
    (rec,) = run_sweep(config_from_text(TRIVIAL))
    assert rec.status == "ok"
    # q = 8 at h/4r = 0.49 is limited by the panel rule, (h/4r)^(2q) ~ 1e-5
    assert rec.abs_error < 2 * (rec.h / (4 * rec.r)) ** 16
    (rec,) = run_sweep(config_from_text(TRIVIAL.replace("q = 8", "q = 16")))
    assert rec.abs_error < 1e-10
    assert rec.abs_error == abs(complex(rec.value_re, rec.value_im) - complex(rec.ref_re, rec.ref_im))
    assert rec.h * rec.M == pytest.approx(2 * math.pi, abs=1e-10)


def test_helmholtz_4h_sweep_decays():
    recs = run_sweep(config_from_text(HELMHOLTZ_4H))
    # r = 4h exceeds half the radius of curvature on the two coarsest meshes
    assert [r.status for r in recs] == ["skipped", "skipped", "ok", "ok"]
    recs = run_sweep(config_from_text(HELMHOLTZ_4H.replace("[16, 32, 64, 128]", "[64, 128, 256, 512]")))
    assert [r.status for r in recs] == ["ok"] * 4
    for rec in recs:
        assert rec.r == pytest.approx(4 * rec.h, abs=1e-12)
    errs = [r.abs_error for r in recs]
    assert all(b < a for a, b in pairwise(errs))
    fit = fit_order([r.h for r in recs], errs)
    assert 4.4 < fit.slope < 5.6


def test_sqrt_h_coupling():
    cfg = config_from_text(HELMHOLTZ_4H.replace("r_equals_4h", "r_equals_sqrt_h").replace(
        "M = [16, 32, 64, 128]", "M = [64, 128]"))
    for rec in run_sweep(cfg):
        assert rec.r == pytest.approx(math.sqrt(rec.h), abs=1e-12)


def test_row_order_and_skips():
    text = TRIVIAL.replace("geometry = circle", "geometry = starfish").replace(
        "geometry_params = [1]", "geometry_params = [1, 0.3, 5]").replace(
        "r = [0.1]", "r = [0.5, 0.05]").replace("N = [2]", "N = [1, 2]").replace(
        "targets = [0.3]", "targets = [0.0, 0.3]")
    recs = run_sweep(config_from_text(text))
    keys = [(r.target, r.N, r.r) for r in recs]
    assert keys == [(t, n, r) for t in ("0.0", "0.3") for n in (1, 2) for r in (0.5, 0.05)]
    # a ball of radius 0.5 does not fit the starfish arm tip
    assert {r.status for r in recs if r.r == 0.5} == {"skipped"}
    assert all(math.isnan(r.abs_error) for r in recs if r.status == "skipped")
    assert {r.status for r in recs if r.r == 0.05} == {"ok"}


def test_csv_roundtrip_and_determinism(tmp_path):
    cfg = config_from_text(HELMHOLTZ_4H.replace("M = [16, 32, 64, 128]", "M = [16, 32]"))
    recs = run_sweep(cfg)
    path = tmp_path / "out.csv"
    write_csv(recs, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# generated")
    assert lines[1] == CSV_HEADER
    assert same(read_csv(path), recs)
    again = run_sweep(cfg)
    assert records_to_csv(again, timestamp=False) == records_to_csv(recs, timestamp=False)


def test_csv_keeps_nan_rows():
    recs = run_sweep(config_from_text(TRIVIAL.replace("r = [0.1]", "r = [0.1, 2]")))
    back = parse_csv(records_to_csv(recs))
    assert same(back, recs)
    assert back[1].status == "skipped" and math.isnan(back[1].value_re)


def test_csv_rejects_bad_header():
    with pytest.raises(ValidationError):
        parse_csv("kernel,geometry\n")


def test_jobs_do_not_change_output():
    cfg = config_from_text(HELMHOLTZ_4H)
    serial = records_to_csv(run_sweep(cfg, jobs=1), timestamp=False)
    parallel = records_to_csv(run_sweep(cfg, jobs=3), timestamp=False)
    assert serial == parallel


def test_fit_order_examples():
    fit = fit_order([0.2, 0.1, 0.05], [1e-2, 1.25e-3, 1.5625e-4])
    assert fit.slope == pytest.approx(3.0, abs=1e-12)
    assert fit.residual < 1e-12 and fit.points == 3
    with pytest.raises(InsufficientDataError):
        fit_order([0.2, 0.1, 0.05], [1e-14] * 3)
    with pytest.raises(InsufficientDataError):
        fit_order([0.2, 0.15, 0.1], [1e-2, 1e-3, 1e-4])


def test_fit_order_log_factor():
    r = np.array([2.0 ** -j for j in range(3, 8)])
    fit = fit_order(r, r ** 4 * np.log(1 / r), log_factor=True)
    assert fit.slope == pytest.approx(4.0, abs=1e-12)


def test_fit_order_from_records():
    base = SweepRecord("cauchy", "circle(1)", "constant", 0.0, 2, 16, 64, 0.1, 0.0, "0.0",
                       1.0, 0.0, 1.0, 0.0, 0.0, "ok")
    recs = [replace(base, r=r, abs_error=2 * r ** 3) for r in (0.4, 0.2, 0.1, 0.05)]
    recs.append(replace(base, r=0.025, abs_error=float("nan"), status="skipped"))
    fit = fit_order(recs)
    assert fit.points == 4
    assert fit.slope == pytest.approx(3.0, abs=1e-12)
