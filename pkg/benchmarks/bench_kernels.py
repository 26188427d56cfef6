"""Time each hot kernel on the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call compiles (or loads the on-disk cache); it is run once
before timing so the table shows steady-state cost only.
"""

import argparse
import timeit

import numpy as np

from qbxlocal import set_backend
from qbxlocal.bie import dlp_qbx_matrix
from qbxlocal.geometry import circle
from qbxlocal.qbx import inverse_power_sums
from qbxlocal.special_functions import bessel_jy, spherical_jy, sph_harm_table


def cases():
    rng = np.random.default_rng(0)
    x = rng.uniform(0.1, 50, 4000)
    th = rng.uniform(0, 2 * np.pi, 4608)
    ph = rng.uniform(0.05, np.pi - 0.05, 4608)
    c = rng.normal(size=4096) + 1j * rng.normal(size=4096)
    inv = 0.5 * np.exp(2j * np.pi * rng.random(4096))
    curve = circle(1.0)
    return [
        ("bessel_jy n<=40, 4000 pts", lambda: bessel_jy(40, x)),
        ("spherical_jy l<=20, 4000 pts", lambda: spherical_jy(20, x)),
        ("sph_harm_table l<=12, 48x96", lambda: sph_harm_table(12, th, ph)),
        ("inverse_power_sums N=20, 4096", lambda: inverse_power_sums(c, inv, 20)),
        ("dlp_qbx_matrix 512x512, N=6", lambda: dlp_qbx_matrix(curve, 64, 8, 6, 0.2)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<34}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, fn in cases():
        times = {}
        for be in ("numba", "numpy"):
            set_backend(be)
            fn()
            times[be] = 1e3 * min(timeit.repeat(fn, number=1, repeat=args.repeat))
        print(f"{name:<34}{times['numba']:>12.2f}{times['numpy']:>12.2f}"
              f"{times['numpy'] / times['numba']:>9.1f}x")


if __name__ == "__main__":
    main()
