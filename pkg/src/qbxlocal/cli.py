"""Command line entry point: ``qbxlocal sweep|eval|selftest|demo-bie``.

Exit status is 0 on success, 1 for invalid input and 2 when the numerics fail.
"""

import argparse
import sys
import time

import numpy as np

from .bie import demo_bie
from .config import SweepConfig, config_from_text, load_config, parse_number
from .densities import constant, exp_mode
from .errors import NumericError, ValidationError
from .geometry import circle, make_curve
from .harness import build_problem, fit_order, run_sweep, write_csv
from .qbx import KernelSpec, QbxParams, eval_on_surface
from .quadrature import gauss_rule
from .reference import onsurface_reference
from .special_functions import bessel_jy

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _numbers(text):
    return tuple(parse_number(part) for part in text.split(",") if part.strip())


def _target(text):
    if ":" in text:
        a, b = text.split(":", 1)
        return (parse_number(a), parse_number(b))
    return parse_number(text)


def _cmd_sweep(args):
    config = load_config(args.config)
    out = args.out or config.out
    if not out:
        raise ValidationError("no output path: pass --out or set 'out' in the config")
    t0 = time.perf_counter()
    records = run_sweep(config, jobs=args.jobs)
    write_csv(records, out)
    counts = {}
    for rec in records:
        counts[rec.status] = counts.get(rec.status, 0) + 1
    summary = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
    print(f"wrote {len(records)} rows to {out} ({summary}) in {time.perf_counter() - t0:.1f}s")
    return EXIT_OK


def _cmd_eval(args):
    dimension = 3 if args.geometry == "sphere" else 2
    config = SweepConfig(
        kernel=args.kernel, geometry=args.geometry, density=args.density, N_list=(args.N,),
        M_list=(args.M,), q=args.q, targets=(_target(args.target),), r_list=(args.r,), k=args.k,
        dimension=dimension, geometry_params=_numbers(args.geometry_params),
        density_params=_numbers(args.density_params), side=args.side)
    kernel, geometry, density = build_problem(config)
    target = config.targets[0]
    params = QbxParams(N=args.N, r=args.r, M=args.M, q=args.q, side=args.side)
    value = complex(eval_on_surface(kernel, geometry, density, target, params))
    print(f"value = {value.real!r} {value.imag:+.17g}i")
    if args.reference:
        ref = onsurface_reference(kernel, geometry, density, target, side=args.side,
                                  N_max=args.N, r_min=args.r)
        print(f"reference = {ref.value.real!r} {ref.value.imag:+.17g}i ({ref.method}, "
              f"estimated error {ref.estimated_error:.2e})")
        print(f"abs_error = {abs(value - ref.value):.6e}")
    return EXIT_OK


def _harmonic(name):
    if name.startswith("zpow:"):
        n = int(name.split(":", 1)[1])
        return lambda z: np.real(np.asarray(z) ** n)
    if name == "zero":
        return lambda z: np.zeros(np.shape(z))
    if name == "exp":
        return lambda z: np.real(np.exp(np.asarray(z)))
    raise ValidationError(f"unknown boundary data {name!r}; use zpow:<n>, exp or zero")


def _cmd_demo_bie(args):
    curve = make_curve(args.geometry, *_numbers(args.geometry_params))
    res = demo_bie(curve, _harmonic(args.data), M=args.M, q=args.q, N=args.N, r=args.r)
    print(f"max interior error = {res.max_error:.3e} at {len(res.probes)} probes "
          f"(system residual {res.residual:.2e})")
    return EXIT_OK


_SELFTEST_CONFIG = """
kernel = cauchy
geometry = circle
geometry_params = [1]
density = constant
N = [2]
r = [0.1]
M = [32]
q = 16
targets = [0.3]
"""


def _selftest_checks():
    def wronskian():
        x = np.linspace(0.1, 50, 200)
        J, Y = bessel_jy(30, x)
        lhs = J[:, 1:] * Y[:, :-1] - J[:, :-1] * Y[:, 1:]
        return float(np.max(np.abs(lhs * (np.pi * x[:, None] / 2) - 1)))

    def gauss():
        g = gauss_rule(16)
        return abs(float(np.sum(g.weights * g.nodes ** 30)) - 2 / 31)

    def jump():
        c = circle(1.0)
        d = constant(1.0)
        inside = eval_on_surface(KernelSpec("cauchy"), c, d, 0.3, QbxParams(N=4, r=0.1, M=64, q=16))
        outside = eval_on_surface(KernelSpec("cauchy"), c, d, 0.3,
                                  QbxParams(N=4, r=0.1, M=64, q=16, side="exterior"))
        return abs(outside - inside + 1)

    def modal():
        c = circle(1.0)
        kern = KernelSpec("helmholtz_slp", 2, 2.0)
        d = exp_mode(3)
        v = eval_on_surface(kern, c, d, 0.4, QbxParams(N=7, r=0.1, M=64, q=10))
        return abs(v - onsurface_reference(kern, c, d, 0.4).value)

    def sweep():
        recs = run_sweep(config_from_text(_SELFTEST_CONFIG))
        return max(rec.abs_error for rec in recs)

    def fit():
        return abs(fit_order([0.2, 0.1, 0.05], [1e-2, 1.25e-3, 1.5625e-4]).slope - 3.0)

    return [("bessel wronskian", wronskian, 1e-10), ("gauss exactness", gauss, 1e-14),
            ("cauchy jump", jump, 1e-9), ("helmholtz modal", modal, 1e-9),
            ("trivial sweep", sweep, 1e-10), ("order fit", fit, 1e-12)]


def _cmd_selftest(args):
    failed = 0
    for name, check, tol in _selftest_checks():
        try:
            value = check()
            ok = value <= tol
            detail = f"{value:.2e} (tol {tol:.0e})"
        except Exception as exc:  # report and continue with the remaining checks
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name:<18} {detail}")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def build_parser():
    p = _Parser(prog="qbxlocal", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sweep", help="run a convergence sweep from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=_cmd_sweep)

    e = sub.add_parser("eval", help="one on-surface QBX evaluation")
    e.add_argument("--kernel", required=True)
    e.add_argument("--k", type=parse_number, default=0.0)
    e.add_argument("--geometry", default="circle")
    e.add_argument("--geometry-params", default="1")
    e.add_argument("--density", default="constant")
    e.add_argument("--density-params", default="")
    e.add_argument("--N", type=int, default=4)
    e.add_argument("--r", type=parse_number, default=0.1)
    e.add_argument("--M", type=int, default=64)
    e.add_argument("--q", type=int, default=16)
    e.add_argument("--target", default="0")
    e.add_argument("--side", choices=("interior", "exterior"), default="interior")
    e.add_argument("--reference", action="store_true", help="also print a reference value")
    e.set_defaults(func=_cmd_eval)

    t = sub.add_parser("selftest", help="quick invariant checks")
    t.set_defaults(func=_cmd_selftest)

    d = sub.add_parser("demo-bie", help="interior Dirichlet Laplace solve with harmonic data")
    d.add_argument("--geometry", default="circle")
    d.add_argument("--geometry-params", default="1")
    d.add_argument("--data", default="zpow:3")
    d.add_argument("--M", type=int, default=64)
    d.add_argument("--q", type=int, default=8)
    d.add_argument("--N", type=int, default=4)
    d.add_argument("--r", type=parse_number, default=None, help="expansion radius (default 4h)")
    d.set_defaults(func=_cmd_demo_bie)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
