"""Bessel, Hankel and spherical-harmonic evaluation.

Cylindrical J_n comes from Miller's downward recurrence normalized with
J_0 + 2 sum J_{2k} = 1; Y_0 and Y_1 follow from the Neumann series in the
same J values, and higher Y_n from the (stable) upward recurrence. Spherical
j_l uses the same downward scheme normalized against the closed forms of
j_0 or j_1, and y_l goes upward from its closed forms.

Spherical harmonics use the Condon-Shortley phase,

    Y_l^m(theta, phi) = Pbar_l^|m|(cos phi) e^{i m theta},   Y_l^{-m} = (-1)^m conj(Y_l^m),

with theta the azimuth and phi the polar angle, so that
omega(theta, phi) = (sin phi cos theta, sin phi sin theta, cos phi). The
normalization is folded into the Legendre recurrence (no factorials).

Tables are laid out as ``table[point, index]``; for spherical harmonics
``index = l*(l+1) + m``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._jit import dispatch, njit
from .errors import CapabilityError, DomainError

MAX_ORDER = 200
EULER_GAMMA = 0.57721566490153286061
_RESCALE_AT = 1e250
_RESCALE_BY = 1e-250


def _miller_start(order, x):
    big = max(order + 1, int(math.ceil(x)))
    start = big + 16 + int(math.sqrt(40.0 * big))
    return start + (start & 1)


# ---------------------------------------------------------------------------
# cylindrical Bessel functions


@njit
def _bessel_jy_jit(nmax, x):
    npts = x.shape[0]
    jout = np.empty((npts, nmax + 1))
    yout = np.empty((npts, nmax + 1))
    for p in range(npts):
        xp = x[p]
        big = max(nmax + 1, int(math.ceil(xp)))
        m = big + 16 + int(math.sqrt(40.0 * big))
        m += m & 1
        f = np.zeros(m + 2)
        f[m] = 1.0
        for n in range(m, 0, -1):
            f[n - 1] = (2.0 * n / xp) * f[n] - f[n + 1]
            if abs(f[n - 1]) > _RESCALE_AT:
                for i in range(n - 1, m + 1):
                    f[i] *= _RESCALE_BY
        s = f[0]
        for n in range(2, m + 1, 2):
            s += 2.0 * f[n]
        for n in range(m + 2):
            f[n] /= s
        lg = math.log(0.5 * xp) + EULER_GAMMA
        s0 = 0.0
        s1 = 0.0
        sign = -1.0
        for k in range(1, m // 2 + 1):
            s0 += sign * f[2 * k] / k
            s1 += sign * (f[2 * k - 1] - f[2 * k + 1]) / k
            sign = -sign
        y0 = (2.0 / math.pi) * lg * f[0] - (4.0 / math.pi) * s0
        y1 = -(2.0 / (math.pi * xp)) * f[0] + (2.0 / math.pi) * lg * f[1] + (2.0 / math.pi) * s1
        for n in range(nmax + 1):
            jout[p, n] = f[n]
        yout[p, 0] = y0
        if nmax >= 1:
            yout[p, 1] = y1
        for n in range(1, nmax):
            yout[p, n + 1] = (2.0 * n / xp) * yout[p, n] - yout[p, n - 1]
    return jout, yout


def _bessel_jy_np(nmax, x):
    npts = x.shape[0]
    m = _miller_start(nmax, float(x.max()))
    f = np.zeros((m + 2, npts))
    f[m] = 1.0
    for n in range(m, 0, -1):
        f[n - 1] = (2.0 * n / x) * f[n] - f[n + 1]
        big = np.abs(f[n - 1]) > _RESCALE_AT
        if big.any():
            f[n - 1:, big] *= _RESCALE_BY
    s = f[0] + 2.0 * f[2:m + 1:2].sum(axis=0)
    f /= s
    lg = np.log(0.5 * x) + EULER_GAMMA
    k = np.arange(1, m // 2 + 1)[:, None]
    sign = np.where(k % 2 == 1, -1.0, 1.0)
    s0 = (sign * f[2 * k[:, 0]] / k).sum(axis=0)
    s1 = (sign * (f[2 * k[:, 0] - 1] - f[2 * k[:, 0] + 1]) / k).sum(axis=0)
    y = np.empty((nmax + 1, npts))
    y[0] = (2.0 / np.pi) * lg * f[0] - (4.0 / np.pi) * s0
    if nmax >= 1:
        y[1] = -(2.0 / (np.pi * x)) * f[0] + (2.0 / np.pi) * lg * f[1] + (2.0 / np.pi) * s1
    for n in range(1, nmax):
        y[n + 1] = (2.0 * n / x) * y[n] - y[n - 1]
    return np.ascontiguousarray(f[:nmax + 1].T), np.ascontiguousarray(y.T)


def _check_args(order_max, x):
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if order_max < 0:
        raise DomainError(f"order must be non-negative, got {order_max}")
    if order_max > MAX_ORDER:
        raise CapabilityError(f"order {order_max} exceeds supported maximum {MAX_ORDER}")
    if x.size and not np.all(x > 0.0):
        raise DomainError("Bessel argument must be positive")
    if x.size and not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite")
    return x


def bessel_jy(order_max, x):
    """J_n(x) and Y_n(x), n = 0..order_max, for an array of positive x.

    Returns two real arrays of shape ``(len(x), order_max + 1)``.
    """
    x = _check_args(order_max, x)
    if x.size == 0:
        return np.empty((0, order_max + 1)), np.empty((0, order_max + 1))
    with np.errstate(over="ignore", invalid="ignore"):
        return dispatch(_bessel_jy_jit, _bessel_jy_np)(int(order_max), x)


def hankel1(order_max, x):
    """H^(1)_n(x) = J_n + i Y_n as a complex table ``(len(x), order_max + 1)``."""
    j, y = bessel_jy(order_max, x)
    return j + 1j * y


def hankel1_with_derivative(order_max, x):
    """H^(1)_n(x) and d/dx H^(1)_n(x) for n = 0..order_max."""
    h = hankel1(order_max + 1, x)
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()[:, None]
    n = np.arange(order_max + 1)
    dh = np.empty((h.shape[0], order_max + 1), dtype=complex)
    dh[:, 0] = -h[:, 1]
    dh[:, 1:] = h[:, :order_max] - n[1:] / x * h[:, 1:order_max + 1]
    return h[:, :order_max + 1], dh


@dataclass(frozen=True)
class BesselBatch:
    order_max: int
    argument: float
    j_values: tuple
    y_values: tuple


def bessel_batch(order_max, x):
    """J_0..J_n and Y_0..Y_n at a single positive argument."""
    j, y = bessel_jy(order_max, [x])
    return BesselBatch(int(order_max), float(x), tuple(j[0]), tuple(y[0]))


def hankel1_batch(order_max, x):
    """H^(1)_0(x) .. H^(1)_{order_max}(x) as a complex numpy vector."""
    return hankel1(order_max, [x])[0]


# ---------------------------------------------------------------------------
# spherical Bessel functions


@njit
def _spherical_jy_jit(lmax, x):
    npts = x.shape[0]
    jout = np.empty((npts, lmax + 1))
    yout = np.empty((npts, lmax + 1))
    for p in range(npts):
        xp = x[p]
        big = max(lmax + 1, int(math.ceil(xp)))
        m = big + 16 + int(math.sqrt(40.0 * big))
        f = np.zeros(m + 2)
        f[m] = 1.0
        for n in range(m, 0, -1):
            f[n - 1] = ((2.0 * n + 1.0) / xp) * f[n] - f[n + 1]
            if abs(f[n - 1]) > _RESCALE_AT:
                for i in range(n - 1, m + 1):
                    f[i] *= _RESCALE_BY
        sx = math.sin(xp)
        cx = math.cos(xp)
        j0 = sx / xp
        j1 = sx / (xp * xp) - cx / xp
        if abs(j0) >= abs(j1):
            scale = j0 / f[0]
        else:
            scale = j1 / f[1]
        for n in range(lmax + 1):
            jout[p, n] = f[n] * scale
        yout[p, 0] = -cx / xp
        if lmax >= 1:
            yout[p, 1] = -cx / (xp * xp) - sx / xp
        for n in range(1, lmax):
            yout[p, n + 1] = ((2.0 * n + 1.0) / xp) * yout[p, n] - yout[p, n - 1]
    return jout, yout


def _spherical_jy_np(lmax, x):
    npts = x.shape[0]
    big = max(lmax + 1, int(math.ceil(float(x.max()))))
    m = big + 16 + int(math.sqrt(40.0 * big))
    f = np.zeros((m + 2, npts))
    f[m] = 1.0
    for n in range(m, 0, -1):
        f[n - 1] = ((2.0 * n + 1.0) / x) * f[n] - f[n + 1]
        large = np.abs(f[n - 1]) > _RESCALE_AT
        if large.any():
            f[n - 1:, large] *= _RESCALE_BY
    sx, cx = np.sin(x), np.cos(x)
    j0 = sx / x
    j1 = sx / (x * x) - cx / x
    scale = np.where(np.abs(j0) >= np.abs(j1), j0 / f[0], j1 / f[1])
    j = f[:lmax + 1] * scale
    y = np.empty((lmax + 1, npts))
    y[0] = -cx / x
    if lmax >= 1:
        y[1] = -cx / (x * x) - sx / x
    for n in range(1, lmax):
        y[n + 1] = ((2.0 * n + 1.0) / x) * y[n] - y[n - 1]
    return np.ascontiguousarray(j.T), np.ascontiguousarray(y.T)


def spherical_jy(lmax, x):
    """j_l(x) and y_l(x), l = 0..lmax, tables of shape ``(len(x), lmax + 1)``."""
    x = _check_args(lmax, x)
    if x.size == 0:
        return np.empty((0, lmax + 1)), np.empty((0, lmax + 1))
    with np.errstate(over="ignore", invalid="ignore"):
        return dispatch(_spherical_jy_jit, _spherical_jy_np)(int(lmax), x)


def spherical_hankel1(lmax, x):
    j, y = spherical_jy(lmax, x)
    return j + 1j * y


def spherical_hankel1_with_derivative(lmax, x):
    """h_l(x) and h_l'(x) for l = 0..lmax."""
    h = spherical_hankel1(lmax + 1, x)
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()[:, None]
    ell = np.arange(lmax + 1)
    dh = np.empty((h.shape[0], lmax + 1), dtype=complex)
    dh[:, 0] = -h[:, 1]
    dh[:, 1:] = h[:, :lmax] - (ell[1:] + 1.0) / x * h[:, 1:lmax + 1]
    return h[:, :lmax + 1], dh


def spherical_j_at(lmax, x):
    """j_l(x) for x >= 0, including the small-argument limit."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if np.any(x < 0):
        raise DomainError("spherical Bessel argument must be non-negative")
    out = np.zeros((x.size, lmax + 1))
    # below 1e-8 the leading term x^l / (2l+1)!! is exact to rounding
    tiny = x < 1e-8
    if tiny.any():
        term = np.ones(tiny.sum())
        for l in range(lmax + 1):
            out[tiny, l] = term
            term = term * x[tiny] / (2 * l + 3)
    if (~tiny).any():
        out[~tiny] = spherical_jy(lmax, x[~tiny])[0]
    return out


def bessel_j_at(nmax, x):
    """J_n(x) for x >= 0 with the exact x = 0 limit."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if np.any(x < 0):
        raise DomainError("Bessel argument must be non-negative")
    out = np.zeros((x.size, nmax + 1))
    zero = x == 0.0
    out[zero, 0] = 1.0
    if (~zero).any():
        out[~zero] = bessel_jy(nmax, x[~zero])[0]
    return out


def spherical_bessel_batch(l_max, x):
    """(j_0..j_lmax, h_0..h_lmax) at a single positive argument."""
    j, y = spherical_jy(l_max, [x])
    return j[0], j[0] + 1j * y[0]


# ---------------------------------------------------------------------------
# spherical harmonics


def sph_index(l, m):
    return l * (l + 1) + m


@njit
def _sph_harm_table_jit(lmax, theta, phi):
    npts = theta.shape[0]
    ncoef = (lmax + 1) * (lmax + 1)
    val = np.zeros((npts, ncoef), dtype=np.complex128)
    dph = np.zeros((npts, ncoef), dtype=np.complex128)
    p = np.zeros((lmax + 2, lmax + 2))
    for i in range(npts):
        c = math.cos(phi[i])
        s = math.sin(phi[i])
        for a in range(lmax + 2):
            for b in range(lmax + 2):
                p[a, b] = 0.0
        p[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
        for m in range(1, lmax + 1):
            p[m, m] = -math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[m - 1, m - 1]
        for m in range(0, lmax):
            p[m + 1, m] = math.sqrt(2.0 * m + 3.0) * c * p[m, m]
        for m in range(0, lmax + 1):
            for l in range(m + 2, lmax + 1):
                a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
                b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
                p[l, m] = a * (c * p[l - 1, m] - b * p[l - 2, m])
        for m in range(0, lmax + 1):
            e = complex(math.cos(m * theta[i]), math.sin(m * theta[i]))
            sgn = -1.0 if m % 2 == 1 else 1.0
            for l in range(m, lmax + 1):
                if l == 0:
                    dp = 0.0
                else:
                    prev = p[l - 1, m] if l - 1 >= m else 0.0
                    dp = (l * c * p[l, m]
                          - math.sqrt((2.0 * l + 1.0) * (l * l - m * m) / (2.0 * l - 1.0)) * prev) / s
                y = p[l, m] * e
                dy = dp * e
                k = l * (l + 1)
                val[i, k + m] = y
                dph[i, k + m] = dy
                if m > 0:
                    val[i, k - m] = sgn * y.conjugate()
                    dph[i, k - m] = sgn * dy.conjugate()
    return val, dph


def _sph_harm_table_np(lmax, theta, phi):
    npts = theta.shape[0]
    ncoef = (lmax + 1) ** 2
    c, s = np.cos(phi), np.sin(phi)
    p = np.zeros((lmax + 2, lmax + 2, npts))
    p[0, 0] = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(1, lmax + 1):
        p[m, m] = -np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[m - 1, m - 1]
    for m in range(lmax):
        p[m + 1, m] = np.sqrt(2.0 * m + 3.0) * c * p[m, m]
    for m in range(lmax + 1):
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            p[l, m] = a * (c * p[l - 1, m] - b * p[l - 2, m])
    val = np.zeros((npts, ncoef), dtype=complex)
    dph = np.zeros((npts, ncoef), dtype=complex)
    for m in range(lmax + 1):
        e = np.exp(1j * m * theta)
        sgn = -1.0 if m % 2 else 1.0
        for l in range(m, lmax + 1):
            if l == 0:
                dp = np.zeros(npts)
            else:
                dp = (l * c * p[l, m]
                      - np.sqrt((2.0 * l + 1.0) * (l * l - m * m) / (2.0 * l - 1.0)) * p[l - 1, m]) / s
            k = l * (l + 1)
            val[:, k + m] = p[l, m] * e
            dph[:, k + m] = dp * e
            if m > 0:
                val[:, k - m] = sgn * np.conj(val[:, k + m])
                dph[:, k - m] = sgn * np.conj(dph[:, k + m])
    return val, dph


def sph_harm_table(lmax, theta, phi):
    """All Y_l^m and dY_l^m/dphi for l <= lmax at arrays of (theta, phi).

    Returns two complex arrays of shape ``(npts, (lmax+1)**2)``. The polar
    derivative divides by sin(phi); keep phi away from the poles.
    """
    if lmax < 0:
        raise DomainError("lmax must be non-negative")
    if lmax > MAX_ORDER:
        raise CapabilityError(f"degree {lmax} exceeds supported maximum {MAX_ORDER}")
    theta = np.atleast_1d(np.asarray(theta, dtype=float)).ravel()
    phi = np.atleast_1d(np.asarray(phi, dtype=float)).ravel()
    theta, phi = np.broadcast_arrays(theta, phi)
    theta = np.ascontiguousarray(theta)
    phi = np.ascontiguousarray(phi)
    with np.errstate(divide="ignore", invalid="ignore"):
        return dispatch(_sph_harm_table_jit, _sph_harm_table_np)(int(lmax), theta, phi)


@dataclass(frozen=True)
class SphericalHarmonicValue:
    degree: int
    order: int
    value: complex
    d_theta: complex
    d_phi: complex


def sph_harm(l, m, theta, phi):
    """Y_l^m(theta, phi) together with its azimuthal and polar derivatives."""
    if l < 0 or abs(m) > l:
        raise DomainError(f"need |m| <= l, got l={l}, m={m}")
    val, dph = sph_harm_table(l, [theta], [phi])
    k = sph_index(l, m)
    y = complex(val[0, k])
    return SphericalHarmonicValue(l, m, y, 1j * m * y, complex(dph[0, k]))


def sphere_frame(theta, phi):
    """Unit vectors (e_r, e_theta, e_phi) at the given angles, each ``(npts, 3)``.

    e_theta is the azimuthal direction, e_phi the polar one.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    e_r = np.stack([sp * ct, sp * st, cp], axis=-1)
    e_theta = np.stack([-st, ct, np.zeros_like(ct)], axis=-1)
    e_phi = np.stack([cp * ct, cp * st, -sp], axis=-1)
    return e_r, e_theta, e_phi


def sph_harm_grad(l, m, theta, phi):
    """Surface gradient of Y_l^m on the unit sphere as a complex 3-vector."""
    v = sph_harm(l, m, theta, phi)
    _, e_theta, e_phi = sphere_frame(theta, phi)
    return v.d_phi * e_phi[0] + (v.d_theta / math.sin(phi)) * e_theta[0]


def sph_harm_grad_table(lmax, theta, phi):
    """Values and Cartesian surface gradients of all Y_l^m, l <= lmax.

    Returns ``(values, grads)`` with ``grads`` of shape ``(npts, ncoef, 3)``.
    """
    val, dph = sph_harm_table(lmax, theta, phi)
    theta = np.atleast_1d(np.asarray(theta, dtype=float)).ravel()
    phi = np.atleast_1d(np.asarray(phi, dtype=float)).ravel()
    _, e_theta, e_phi = sphere_frame(theta, phi)
    ms = np.concatenate([np.arange(-l, l + 1) for l in range(lmax + 1)])
    dth_over_sin = (1j * ms)[None, :] * val / np.sin(phi)[:, None]
    grads = dph[:, :, None] * e_phi[:, None, :] + dth_over_sin[:, :, None] * e_theta[:, None, :]
    return val, grads
