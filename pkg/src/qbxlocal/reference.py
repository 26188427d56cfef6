"""Ground-truth values: closed-form modal solutions, adaptive direct quadrature
off the surface, and self-convergence on the surface.
"""

import math
from dataclasses import dataclass

import numpy as np

from .densities import Density
from .errors import CapabilityError, ConvergenceFailure, DomainError, InsufficientDataError
from .geometry import TWO_PI, Sphere, angles_of, place_center
from .qbx import (QbxExpansion, evaluate_expansion, helmholtz2d_kernel_factors)
from .quadrature import _frame_about, adaptive_integrate
from .special_functions import (bessel_j_at, hankel1, hankel1_with_derivative, sph_harm_table,
                                sph_index, spherical_hankel1_with_derivative, spherical_j_at)

METHODS = ("modal_closed_form", "adaptive_direct", "self_convergence")


@dataclass(frozen=True)
class ReferenceValue:
    value: complex
    method: str
    estimated_error: float
    usable: bool = True

    def check(self, tol):
        """Copy flagged unusable when the error estimate misses ``tol``."""
        return ReferenceValue(self.value, self.method, self.estimated_error,
                              self.usable and self.estimated_error < tol)


# ---------------------------------------------------------------------------
# modal closed forms


def _modes_of(density):
    if isinstance(density, Density):
        if density.modes is None:
            raise CapabilityError(f"density {density.describe()} has no finite modal expansion")
        return density.modes
    if isinstance(density, tuple):
        return {density: 1.0}
    return {int(density): 1.0}


def _modal_2d(kernel, R, modes, z, side):
    rho, th = abs(z), math.atan2(z.imag, z.real)
    if side == "exterior" and kernel.family != "cauchy":
        raise CapabilityError("exterior modal references are available for the Cauchy kernel only")
    if rho > R * (1 + 1e-14):
        raise DomainError(f"point {z} lies outside circle({R})")
    total = 0j
    for n, c in modes.items():
        fam = kernel.family
        if fam == "cauchy":
            if side == "interior":
                term = (z / R) ** n if n >= 0 else 0.0
            else:
                term = -((R / z) ** (-n)) if n < 0 else 0.0
        elif fam == "laplace_slp":
            if n == 0:
                term = R * math.log(R)
            elif n > 0:
                term = -R / (2 * n) * (z / R) ** n
            else:
                term = -R / (2 * (-n)) * (z.conjugate() / R) ** (-n)
        elif fam == "laplace_dlp":
            a = (z / R) ** n if n >= 0 else 0.0
            b = (z / R) ** (-n) if n <= 0 else 0.0
            term = -0.5 * (a + np.conj(b))
        else:
            m = abs(n)
            k = kernel.k
            jv = bessel_j_at(m, k * rho)[0][m]
            if fam == "helmholtz_slp":
                radial = hankel1(m, [k * R])[0, m]
            else:
                radial = k * hankel1_with_derivative(m, [k * R])[1][0, m]
            term = 0.5j * math.pi * R * jv * radial * np.exp(1j * n * th)
        total += c * term
    return complex(total)


def _modal_3d(kernel, R, modes, x):
    rho, th, ph = angles_of(np.asarray(x, dtype=float))
    rho = float(rho)
    if rho > R * (1 + 1e-14):
        raise DomainError(f"point {x} lies outside sphere({R})")
    k = kernel.k
    lmax = max(l for l, _ in modes) if modes else 0
    jl = spherical_j_at(lmax, k * rho)[0]
    h, dh = spherical_hankel1_with_derivative(lmax, [k * R])
    if rho == 0:
        th, ph = 0.0, 0.0
    y, _ = sph_harm_table(lmax, [float(th)], [float(ph)])
    total = 0j
    for (l, m), c in modes.items():
        radial = h[0, l] if kernel.layer == "slp" else k * dh[0, l]
        total += c * 1j * k * R * R * jl[l] * radial * y[0, sph_index(l, m)]
    return complex(total)


def modal_reference(kernel, geometry, density, point, side="interior"):
    """Closed-form layer potential of a modal density on a circle or sphere at the origin.

    ``density`` is a Density with known modes, an integer Fourier mode n, or
    an (l, m) pair. Points on the boundary give the one-sided limit from ``side``.
    """
    if isinstance(geometry, Sphere):
        if kernel.dimension != 3:
            raise CapabilityError("sphere references need a 3D kernel")
        value = _modal_3d(kernel, geometry.radius, _modes_of(density), point)
    elif getattr(geometry, "name", None) == "circle":
        if kernel.dimension != 2:
            raise CapabilityError("circle references need a 2D kernel")
        value = _modal_2d(kernel, geometry.params[0], _modes_of(density), complex(point), side)
    else:
        raise CapabilityError(f"no modal solution for {geometry.describe()}")
    return ReferenceValue(value, "modal_closed_form", 0.0)


# ---------------------------------------------------------------------------
# direct adaptive quadrature away from the boundary


def _kernel_2d(kernel, y, dy, z):
    """Kernel times the parameter-measure factor, so the integral is over dt."""
    diff = y - z
    d = np.abs(diff)
    s = np.abs(dy)
    fam = kernel.family
    if fam == "cauchy":
        return dy / diff / (2j * math.pi)
    if fam == "laplace_slp":
        return np.log(d) * s / (2 * math.pi)
    if fam == "laplace_dlp":
        return -np.imag(dy / diff) / (2 * math.pi)
    k = kernel.k
    h = hankel1(1, k * d)
    if fam == "helmholtz_slp":
        return 0.25j * h[:, 0] * s
    n_dot = np.real((-1j * dy / s) * np.conj(diff)) / d
    return 0.25j * (-k * h[:, 1]) * n_dot * s


def _kernel_3d(kernel, y, normals, x):
    rel = y - x[None, :]
    d = np.linalg.norm(rel, axis=1)
    k = kernel.k
    g = np.exp(1j * k * d) / (4 * math.pi * d)
    if kernel.layer == "slp":
        return g
    return g * (1j * k * d - 1) / d * np.sum(normals * rel, axis=1) / d


def _direct_sphere(kernel, sphere, density, x, tol):
    R = sphere.radius
    rho = np.linalg.norm(x)
    if rho > 0:
        _, th0, ph0 = angles_of(x)
        e1, e2, e3 = _frame_about(float(th0), float(ph0))
    else:
        e1, e2, e3 = np.eye(3)

    def ring_sums(n_chi):
        chi = TWO_PI * (np.arange(n_chi) + 0.5) / n_chi

        def f(psi):
            sp, cp = np.sin(psi)[:, None], np.cos(psi)[:, None]
            dirs = ((sp * np.cos(chi))[..., None] * e1 + (sp * np.sin(chi))[..., None] * e2
                    + cp[..., None] * e3).reshape(-1, 3)
            _, th, ph = angles_of(dirs)
            vals = _kernel_3d(kernel, R * dirs, dirs, x) * density(th, ph)
            vals = vals.reshape(len(psi), n_chi).sum(axis=1) * (TWO_PI / n_chi)
            return vals * R * R * np.sin(psi)

        return f

    values = []
    for n_chi in (32, 64, 128, 256):
        v, err = adaptive_integrate(ring_sums(n_chi), 0.0, math.pi, tol=tol * 0.1, l1_relative=True)
        values.append(complex(v))
        if len(values) > 1 and abs(values[-1] - values[-2]) < tol:
            return values[-1], max(abs(values[-1] - values[-2]), float(np.max(err)))
    raise ConvergenceFailure(f"direct sphere quadrature did not reach {tol}")


def direct_offsurface(kernel, geometry, density, point, tol=1e-12):
    """Layer potential at an off-boundary point by adaptive quadrature."""
    if isinstance(geometry, Sphere):
        x = np.asarray(point, dtype=float)
        if abs(np.linalg.norm(x) - geometry.radius) <= 0:
            raise DomainError("point lies on the surface")
        value, err = _direct_sphere(kernel, geometry, density, x, tol)
        return ReferenceValue(value, "adaptive_direct", err).check(max(tol, 1e-15) * 10)
    z = complex(point)

    def f(t):
        return _kernel_2d(kernel, geometry.w(t), geometry.dw(t), z) * density(t)

    # start with intervals no longer than the distance to the boundary
    ts = np.linspace(0, TWO_PI, 2049)
    dist = float(np.min(np.abs(geometry.w(ts) - z)))
    if dist <= 0:
        raise DomainError("point lies on the boundary")
    L = geometry.arc_length()
    initial = int(min(4096, max(8, math.ceil(L / dist))))
    value, err = adaptive_integrate(f, 0.0, TWO_PI, tol=tol, l1_relative=True, initial=initial)
    return ReferenceValue(complex(value), "adaptive_direct", float(np.max(err))).check(tol * 10)


# ---------------------------------------------------------------------------
# self-convergence on the surface


def adaptive_expansion(kernel, curve, density, placement, N, tol=1e-12):
    """2D QBX expansion whose coefficient integrals are done adaptively.

    This removes the panel-quadrature error entirely, leaving only truncation.
    """
    xc = placement.center

    def geometry(t):
        w, dw = curve.w(t), curve.dw(t)
        return w - xc, dw, np.abs(dw), np.asarray(density(t), dtype=complex)

    j = np.arange(N + 1)
    fam = kernel.family
    if fam in ("cauchy", "laplace_dlp"):
        scale = 1 / (2j * math.pi) if fam == "cauchy" else 1 / (2 * math.pi)

        def f(t):
            diff, dw, _, phi = geometry(t)
            return (phi * dw * scale)[:, None] / diff[:, None] ** (j + 1)[None, :]
        kind = "taylor" if fam == "cauchy" else "taylor_dlp"
    elif fam == "laplace_slp":
        jj = np.where(j == 0, 1, j)

        def f(t):
            diff, _, s, phi = geometry(t)
            out = (phi * s / (2 * math.pi))[:, None] / (jj[None, :] * diff[:, None] ** j[None, :])
            out[:, 0] = phi * s * np.log(np.abs(diff)) / (2 * math.pi)
            return out
        kind = "log_series"
    else:
        def f(t):
            diff, dw, s, phi = geometry(t)
            normals = -1j * dw / s
            return 0.25j * (phi * s)[:, None] * helmholtz2d_kernel_factors(
                kernel.k, diff, normals, N, kernel.layer)
        kind = "fourier_bessel"

    initial = int(min(4096, max(16, math.ceil(TWO_PI * 4 * float(curve.speed(placement.target))
                                                / placement.radius / 64))))
    coeffs, _ = adaptive_integrate(f, 0.0, TWO_PI, tol=tol, l1_relative=True, initial=initial)
    coeffs = np.asarray(coeffs, dtype=complex)
    a0 = 0.0
    if kind == "log_series":
        a0 = float(coeffs[0].real)
        coeffs[0] = 0.0
    return QbxExpansion(kernel, xc, placement.radius, int(N), kind, coeffs, a0=a0,
                        target_point=placement.target_point)


def self_convergence_reference(kernel, curve, density, target, N_max, r_min, side="interior"):
    """On-surface value from a deeper, finer QBX run with adaptive coefficients.

    The reference uses order N_max + 4 at radius r_min / 4; the estimated
    error is its difference from the (N_max + 3, r_min / 2) level.
    """
    levels = [(N_max + 3, r_min / 2), (N_max + 4, r_min / 4)]
    vals = []
    for N, r in levels:
        placement = place_center(curve, target, r, side)
        vals.append(evaluate_expansion(adaptive_expansion(kernel, curve, density, placement, N),
                                       placement.target_point))
    return ReferenceValue(vals[-1], "self_convergence", abs(vals[-1] - vals[-2]))


def onsurface_reference(kernel, geometry, density, target, tol=1e-10, side="interior",
                        N_max=None, r_min=None):
    """Ground truth for the one-sided boundary value at ``target``.

    Circles and spheres with modal densities use the closed form; anything
    else uses self-convergence, which needs the largest order ``N_max`` and
    smallest radius ``r_min`` of the runs it will be compared against.
    """
    is_circle = getattr(geometry, "name", None) == "circle"
    if (isinstance(geometry, Sphere) or is_circle) and getattr(density, "modes", None) is not None:
        if isinstance(geometry, Sphere):
            point = geometry.position(*target)
        else:
            point = complex(geometry.w(target))
        try:
            return modal_reference(kernel, geometry, density, point, side)
        except CapabilityError:
            if isinstance(geometry, Sphere):
                raise
    if isinstance(geometry, Sphere):
        raise CapabilityError("sphere references need a modal density")
    if N_max is None or r_min is None:
        raise InsufficientDataError("self-convergence reference needs N_max and r_min")
    return self_convergence_reference(kernel, geometry, density, target, N_max, r_min, side).check(tol)


__all__ = ["ReferenceValue", "METHODS", "modal_reference", "direct_offsurface", "adaptive_expansion",
           "self_convergence_reference", "onsurface_reference"]
