"""Convergence sweeps, CSV records and order fitting."""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields, replace
from datetime import datetime, timezone

import numpy as np

from .densities import make_density
from .errors import (CapabilityError, GeometryViolation, InsufficientDataError, NumericError,
                     PlacementError, ValidationError)
from .geometry import Sphere, make_curve, make_surface
from .qbx import KernelSpec, QbxParams, eval_on_surface
from .reference import onsurface_reference

CSV_HEADER = ("kernel,geometry,density,k,N,q,M,h,r,target,value_re,value_im,"
              "ref_re,ref_im,abs_error,status")
ERROR_FLOOR = 1e-13


@dataclass(frozen=True)
class SweepRecord:
    kernel: str
    geometry: str
    density: str
    k: float
    N: int
    q: int
    M: int
    h: float
    r: float
    target: str
    value_re: float
    value_im: float
    ref_re: float
    ref_im: float
    abs_error: float
    status: str


_INT_FIELDS = {"N", "q", "M"}
_STR_FIELDS = {"kernel", "geometry", "density", "target", "status"}
_FIELD_TYPES = [(f.name, int if f.name in _INT_FIELDS else str if f.name in _STR_FIELDS else float)
                for f in fields(SweepRecord)]


# ---------------------------------------------------------------------------
# building blocks


def build_problem(config):
    """(kernel, geometry, density) objects described by a config."""
    kernel = KernelSpec(config.kernel, config.dimension, config.k)
    if config.dimension == 3:
        geometry = make_surface(config.geometry, *config.geometry_params)
    else:
        geometry = make_curve(config.geometry, *config.geometry_params)
    density = make_density(config.density, config.density_params, config.dimension,
                           None if config.dimension == 3 else geometry)
    return kernel, geometry, density


def _label(name, params):
    if not params:
        return name
    return f"{name}({' '.join(format(p, 'g') for p in params)})"


def _target_label(t):
    if isinstance(t, tuple):
        return f"{t[0]!r}:{t[1]!r}"
    return repr(float(t))


def expand_rows(config, arc_length):
    """Deterministic list of (target, N, M, r) combinations."""
    rows = []
    for target in config.targets:
        for N in config.N_list:
            for M in config.M_list:
                h = arc_length / M
                if config.coupling == "fixed_r":
                    radii = config.r_list
                elif config.coupling == "r_equals_4h":
                    radii = (4.0 * h,)
                else:
                    radii = (math.sqrt(h),)
                for r in radii:
                    rows.append((target, N, M, h, r))
    return rows


def _reference_for(config, kernel, geometry, density, target, r_min):
    try:
        return onsurface_reference(kernel, geometry, density, target, tol=config.reference_tol,
                                   side=config.side, N_max=max(config.N_list), r_min=r_min)
    except (ValidationError, NumericError):
        return None


def _evaluate_row(args):
    config, row, ref = args
    kernel, geometry, density = build_problem(config)
    target, N, M, h, r = row
    params = QbxParams(N=N, r=r, M=M, q=config.q, side=config.side,
                       n_phi=config.n_phi, n_theta=config.n_theta)
    nan = float("nan")
    try:
        value = complex(eval_on_surface(kernel, geometry, density, target, params))
        status = "ok"
    except (PlacementError, GeometryViolation, CapabilityError):
        value, status = complex(nan, nan), "skipped"
    except (ValidationError, NumericError):
        value, status = complex(nan, nan), "error"
    if ref is None or not ref.usable:
        ref_value = complex(nan, nan)
        if status == "ok":
            status = "no_reference"
    else:
        ref_value = ref.value
    err = abs(value - ref_value) if status == "ok" else nan
    return SweepRecord(config.kernel, _label(config.geometry, config.geometry_params),
                       _label(config.density, config.density_params), float(config.k), int(N),
                       int(config.q), int(M), float(h), float(r), _target_label(target),
                       value.real, value.imag, ref_value.real, ref_value.imag, float(err), status)


def run_sweep(config, jobs=1):
    """Evaluate every parameter combination of ``config`` against its reference.

    Rows that fail placement or clearance checks are kept with status
    ``skipped``; numeric failures get status ``error``. The sweep itself
    only raises for an invalid configuration. Output order does not depend
    on ``jobs``.
    """
    kernel, geometry, density = build_problem(config)
    if isinstance(geometry, Sphere):
        # 3D rows carry the polar node count as M and pi*R/n_phi as h
        h = math.pi * geometry.radius / config.n_phi
        rows = [(t, N, config.n_phi, h, r)
                for (t, N, _, _, r) in expand_rows(replace(config, M_list=(1,)), h)]
    else:
        rows = expand_rows(config, geometry.arc_length())
    r_min = min(r for *_, r in rows)
    refs = {}
    for target in config.targets:
        key = _target_label(target)
        refs[key] = _reference_for(config, kernel, geometry, density, target, r_min)
    tasks = [(config, row, refs[_target_label(row[0])]) for row in rows]
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_evaluate_row, tasks))
    return [_evaluate_row(task) for task in tasks]


# ---------------------------------------------------------------------------
# CSV


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_to_csv(records, timestamp=True):
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    buf.write(CSV_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for rec in records:
        writer.writerow([_fmt(v) for v in astuple(rec)])
    return buf.getvalue()


def write_csv(records, path, timestamp=True):
    with open(path, "w", newline="") as fh:
        fh.write(records_to_csv(records, timestamp))


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not lines or lines[0] != CSV_HEADER:
        raise ValidationError("CSV header does not match the sweep schema")
    out = []
    for row in csv.reader(lines[1:]):
        if len(row) != len(_FIELD_TYPES):
            raise ValidationError(f"CSV row has {len(row)} fields, expected {len(_FIELD_TYPES)}")
        out.append(SweepRecord(*(conv(v) for (_, conv), v in zip(_FIELD_TYPES, row))))
    return out


def read_csv(path):
    with open(path, newline="") as fh:
        return parse_csv(fh.read())


# ---------------------------------------------------------------------------
# order fitting


@dataclass(frozen=True)
class OrderFit:
    slope: float
    residual: float
    points: int


def fit_order(params, errors=None, log_factor=False, floor=ERROR_FLOOR):
    """Least-squares slope of log(error) against log(param).

    Accepts two sequences, or a sequence of SweepRecords (fitted against r).
    Errors at or below ``floor`` and non-finite errors are dropped; at least
    three points spanning two octaves must remain. With ``log_factor`` the
    errors are divided by log(1/param) first. The residual is the RMS misfit
    in natural-log units.
    """
    if errors is None:
        recs = [rec for rec in params if rec.status == "ok"]
        params = [rec.r for rec in recs]
        errors = [rec.abs_error for rec in recs]
    p = np.asarray(params, dtype=float)
    e = np.asarray(errors, dtype=float)
    if p.shape != e.shape:
        raise ValidationError("parameter and error sequences differ in length")
    keep = np.isfinite(e) & (e > floor) & (p > 0)
    p, e = p[keep], e[keep]
    if len(p) < 3:
        raise InsufficientDataError(f"need at least 3 errors above {floor:g}, have {len(p)}")
    if p.max() / p.min() < 4.0 * (1 - 1e-12):
        raise InsufficientDataError("parameters span less than two octaves")
    if log_factor:
        if np.any(p >= 1):
            raise ValidationError("log(1/param) factor needs parameters below 1")
        e = e / np.log(1.0 / p)
    x, y = np.log(p), np.log(e)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return OrderFit(float(slope), resid, int(len(p)))
