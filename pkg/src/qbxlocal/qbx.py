"""Local expansions of layer potentials and their on-surface evaluation.

Each kernel family has a coefficient routine (smooth quadrature over the
boundary, coordinates relative to the expansion center) and an evaluation
routine (the truncated series at a point of the ball). ``eval_on_surface``
chains center placement, coefficients and evaluation.

Conventions:

* cauchy:       f(z) = 1/(2 pi i) int phi dw / (w - z)
* laplace_slp:  u(z) = 1/(2 pi) int phi log|w - z| ds
* laplace_dlp:  v(z) = -1/(2 pi) int phi Im[w' / (w - z)] dt
                (normal derivative of -log/(2 pi), outward normal; equals -1
                inside for phi = 1)
* helmholtz 2D: G = (i/4) H_0^(1)(k|x - y|), DLP uses d/dn_y
* helmholtz 3D: G = exp(ik|x - y|) / (4 pi |x - y|), DLP uses d/dn_y
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._jit import dispatch, njit
from .errors import DomainError, GeometryViolation
from .geometry import Sphere, angles_of, panel_containing, panelize, place_center
from .quadrature import gauss_rule, panel_nodes, target_sphere_rule
from .special_functions import (bessel_j_at, hankel1, hankel1_with_derivative,
                                sph_harm_grad_table, sph_harm_table, spherical_hankel1,
                                spherical_hankel1_with_derivative, spherical_j_at)

FAMILIES = ("cauchy", "laplace_slp", "laplace_dlp", "helmholtz_slp", "helmholtz_dlp")
_CLEARANCE = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    family: str
    dimension: int = 2
    k: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown kernel family {self.family!r}")
        if self.dimension not in (2, 3):
            raise DomainError(f"dimension must be 2 or 3, got {self.dimension}")
        if self.dimension == 3 and not self.family.startswith("helmholtz"):
            raise DomainError(f"{self.family} is only available in 2D")
        if self.family.startswith("helmholtz"):
            if not self.k > 0:
                raise DomainError(f"helmholtz kernels need k > 0, got {self.k}")
        elif self.k != 0:
            raise DomainError(f"{self.family} takes no wavenumber")

    @property
    def layer(self):
        return "dlp" if self.family.endswith("dlp") else "slp"


@dataclass(frozen=True)
class QbxExpansion:
    kernel: KernelSpec
    center: object
    radius: float
    order: int
    kind: str
    coefficients: np.ndarray = field(repr=False)
    a0: float = 0.0
    # the on-surface target the ball was placed for, if any
    target_point: object = None

    def coefficient(self, index):
        """alpha_l for fourier_bessel, alpha_lm with index=(l, m) for sph_harm, else a_j."""
        c = self.coefficients
        if self.kind == "fourier_bessel":
            return c[index + self.order]
        if self.kind == "sph_harm":
            l, m = index
            return c[l * (l + 1) + m]
        return c[index]


# ---------------------------------------------------------------------------
# kernels


@njit
def _inverse_power_sums_jit(c, inv, nmax):
    out = np.zeros(nmax + 1, dtype=np.complex128)
    for n in range(c.shape[0]):
        p = c[n]
        out[0] += p
        for j in range(1, nmax + 1):
            p *= inv[n]
            out[j] += p
    return out


def _inverse_power_sums_np(c, inv, nmax):
    out = np.empty(nmax + 1, dtype=complex)
    p = c.astype(complex)
    out[0] = p.sum()
    for j in range(1, nmax + 1):
        p = p * inv
        out[j] = p.sum()
    return out


def inverse_power_sums(c, inv, nmax):
    """S_j = sum_n c_n inv_n**j for j = 0..nmax."""
    c = np.ascontiguousarray(c, dtype=complex)
    inv = np.ascontiguousarray(inv, dtype=complex)
    return dispatch(_inverse_power_sums_jit, _inverse_power_sums_np)(c, inv, int(nmax))


def _check_clearance(dist, r):
    bad = dist < r * (1.0 - _CLEARANCE)
    if bad.any():
        i = int(np.argmax(bad))
        raise GeometryViolation(
            f"source node {i} lies inside the expansion ball "
            f"(distance {dist[i]:.6g} < radius {r:.6g})")


def _nodes_2d(curve, density, placement, panels, rule):
    nodes = panel_nodes(curve, panels, rule)
    diff = nodes.w - placement.center
    dist = np.abs(diff)
    _check_clearance(dist, placement.radius)
    phi = np.asarray(density(nodes.t), dtype=complex)
    if not np.all(np.isfinite(phi)):
        raise DomainError("density is not finite at all quadrature nodes")
    return nodes, diff, dist, phi


def _require_real(density, phi):
    if np.max(np.abs(phi.imag), initial=0.0) > 0:
        raise DomainError(f"laplace kernels need a real density, got {density.describe()}")


def _panels_for(curve, panels):
    if isinstance(panels, int):
        return panelize(curve, panels)
    return panels


def _rule_for(rule):
    return gauss_rule(rule) if isinstance(rule, int) else rule


# ---------------------------------------------------------------------------
# 2D Cauchy and Laplace


def cauchy_coeffs(curve, density, placement, N, panels, rule):
    """Taylor coefficients a_j = 1/(2 pi i) int phi w' dt / (w - x_c)**(j+1)."""
    nodes, diff, _, phi = _nodes_2d(curve, density, placement, _panels_for(curve, panels), _rule_for(rule))
    inv = 1.0 / diff
    c = phi * nodes.dw * nodes.weights * inv
    a = inverse_power_sums(c, inv, N) / (2j * math.pi)
    return QbxExpansion(KernelSpec("cauchy"), placement.center, placement.radius, int(N),
                        "taylor", a, target_point=placement.target_point)


def _horner(coeffs, z):
    acc = np.zeros(np.shape(z), dtype=complex)
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def _local_z(expansion, theta0, rho):
    rho = expansion.radius if rho is None else rho
    return rho * np.exp(1j * np.asarray(theta0, dtype=float))


def cauchy_eval(expansion, theta0, rho=None):
    """sum_j a_j (rho e^{i theta0})**j, rho defaulting to the ball radius."""
    if expansion.kind != "taylor":
        raise DomainError(f"expected a taylor expansion, got {expansion.kind}")
    return _horner(expansion.coefficients, _local_z(expansion, theta0, rho))[()]


def laplace_slp_coeffs(curve, density, placement, N, panels, rule):
    """A_0 = (1/2pi) int phi log|w - x_c| ds and a_j = (1/2pi) int phi ds / (j (w - x_c)**j)."""
    nodes, diff, dist, phi = _nodes_2d(curve, density, placement, _panels_for(curve, panels), _rule_for(rule))
    _require_real(density, phi)
    ds = nodes.arc_weights
    a0 = float(np.sum(phi.real * np.log(dist) * ds) / (2.0 * math.pi))
    s = inverse_power_sums(phi.real * ds, 1.0 / diff, N)
    a = np.zeros(N + 1, dtype=complex)
    j = np.arange(1, N + 1)
    a[1:] = s[1:] / (j * 2.0 * math.pi)
    return QbxExpansion(KernelSpec("laplace_slp"), placement.center, placement.radius, int(N),
                        "log_series", a, a0=a0, target_point=placement.target_point)


def laplace_slp_eval(expansion, theta0, rho=None):
    """A_0 - Re sum_{j>=1} a_j z**j."""
    if expansion.kind != "log_series":
        raise DomainError(f"expected a log_series expansion, got {expansion.kind}")
    z = _local_z(expansion, theta0, rho)
    c = expansion.coefficients.copy()
    c[0] = 0.0
    return (expansion.a0 - np.real(_horner(c, z)))[()]


def laplace_dlp_coeffs(curve, density, placement, N, panels, rule):
    """b_j = (1/2pi) int phi w' dt / (w - x_c)**(j+1), j = 0..N."""
    nodes, diff, _, phi = _nodes_2d(curve, density, placement, _panels_for(curve, panels), _rule_for(rule))
    _require_real(density, phi)
    inv = 1.0 / diff
    b = inverse_power_sums(phi.real * nodes.dw * nodes.weights * inv, inv, N) / (2.0 * math.pi)
    return QbxExpansion(KernelSpec("laplace_dlp"), placement.center, placement.radius, int(N),
                        "taylor_dlp", b, target_point=placement.target_point)


def laplace_dlp_eval(expansion, theta0, rho=None):
    """-Im sum_{j=0}^N b_j z**j."""
    if expansion.kind != "taylor_dlp":
        raise DomainError(f"expected a taylor_dlp expansion, got {expansion.kind}")
    return (-np.imag(_horner(expansion.coefficients, _local_z(expansion, theta0, rho))))[()]


# ---------------------------------------------------------------------------
# 2D Helmholtz


def helmholtz2d_kernel_factors(k, diff, normals, lmax, layer):
    """Per-node factors F[n, l + lmax] whose weighted sums give alpha_l / (i/4).

    SLP: H_|l|(k d) e^{-i l phi}. DLP: the outward normal derivative of the
    same, using the radial (k H') and azimuthal (-i l H / d) parts.
    """
    dist = np.abs(diff)
    ang = np.angle(diff)
    ls = np.arange(-lmax, lmax + 1)
    phase = np.exp(-1j * ls[None, :] * ang[:, None])
    if layer == "slp":
        h = hankel1(lmax, k * dist)
        return h[:, np.abs(ls)] * phase
    h, dh = hankel1_with_derivative(lmax, k * dist)
    unit = diff / dist
    n_rad = np.real(normals * np.conj(unit))
    n_azi = np.imag(normals * np.conj(unit))
    radial = k * dh[:, np.abs(ls)] * n_rad[:, None]
    azimuthal = (-1j * ls[None, :] / dist[:, None]) * h[:, np.abs(ls)] * n_azi[:, None]
    return (radial + azimuthal) * phase


def helmholtz2d_coeffs(curve, density, placement, N, panels, rule, layer="slp", k=None):
    """alpha_l = (i/4) int d^layer[H_|l|(k|y - x_c|) e^{-i l phi_y}] phi(y) ds, l = -N..N."""
    if k is None or not k > 0:
        raise DomainError(f"helmholtz expansions need k > 0, got {k}")
    if layer not in ("slp", "dlp"):
        raise DomainError(f"layer must be 'slp' or 'dlp', got {layer!r}")
    nodes, diff, _, phi = _nodes_2d(curve, density, placement, _panels_for(curve, panels), _rule_for(rule))
    normals = -1j * nodes.dw / nodes.speed
    factors = helmholtz2d_kernel_factors(k, diff, normals, N, layer)
    alpha = 0.25j * ((phi * nodes.arc_weights) @ factors)
    kernel = KernelSpec("helmholtz_" + layer, 2, float(k))
    return QbxExpansion(kernel, placement.center, placement.radius, int(N), "fourier_bessel",
                        alpha, target_point=placement.target_point)


def helmholtz2d_eval(expansion, theta0, rho=None):
    """sum_l alpha_l J_|l|(k rho) e^{i l theta0}; l = -N..N (SLP) or 1-N..N-1 (DLP)."""
    if expansion.kind != "fourier_bessel":
        raise DomainError(f"expected a fourier_bessel expansion, got {expansion.kind}")
    N = expansion.order
    lmax = N - 1 if expansion.kernel.layer == "dlp" else N
    if lmax < 0:
        return 0j
    rho = expansion.radius if rho is None else rho
    jv = bessel_j_at(lmax, expansion.kernel.k * rho)[0]
    ls = np.arange(-lmax, lmax + 1)
    alpha = expansion.coefficients[N - lmax:N + lmax + 1]
    return complex(np.sum(alpha * jv[np.abs(ls)] * np.exp(1j * ls * theta0)))


# ---------------------------------------------------------------------------
# 3D Helmholtz


def helmholtz3d_kernel_factors(k, rel, normals, lmax, layer):
    """Per-node factors whose weighted sums give alpha_lm / (ik).

    SLP: h_l(k d) conj(Y_l^m(dir)). DLP: the normal derivative, radial part
    k h_l' conj(Y) (n . e_r) plus tangential part (h_l / d) n . conj(grad_S Y).
    """
    dist, theta, phi = angles_of(rel)
    ls = np.concatenate([np.full(2 * l + 1, l) for l in range(lmax + 1)])
    if layer == "slp":
        y, _ = sph_harm_table(lmax, theta, phi)
        h = spherical_hankel1(lmax, k * dist)
        return h[:, ls] * np.conj(y)
    y, grads = sph_harm_grad_table(lmax, theta, phi)
    h, dh = spherical_hankel1_with_derivative(lmax, k * dist)
    e_r = rel / dist[:, None]
    n_rad = np.sum(normals * e_r, axis=1)
    n_tan = np.einsum("nkc,nc->nk", np.conj(grads), normals)
    return k * dh[:, ls] * np.conj(y) * n_rad[:, None] + (h[:, ls] / dist[:, None]) * n_tan


def helmholtz3d_coeffs(surface, density, placement, N, sphere_rule, layer="slp", k=None):
    """alpha_lm = ik int d^layer[h_l(k|y - x_c|) conj(Y_l^m)] phi(y) dS, l <= N."""
    if k is None or not k > 0:
        raise DomainError(f"helmholtz expansions need k > 0, got {k}")
    if layer not in ("slp", "dlp"):
        raise DomainError(f"layer must be 'slp' or 'dlp', got {layer!r}")
    pts = sphere_rule.points()
    rel = pts - np.asarray(placement.center)[None, :]
    _check_clearance(np.linalg.norm(rel, axis=1), placement.radius)
    phi = np.asarray(density(sphere_rule.theta, sphere_rule.phi), dtype=complex)
    factors = helmholtz3d_kernel_factors(k, rel, sphere_rule.normals(), N, layer)
    alpha = 1j * k * ((phi * sphere_rule.weights) @ factors)
    kernel = KernelSpec("helmholtz_" + layer, 3, float(k))
    return QbxExpansion(kernel, np.asarray(placement.center), placement.radius, int(N), "sph_harm",
                        alpha, target_point=placement.target_point)


def helmholtz3d_eval(expansion, theta0, phi0, rho=None):
    """sum_{l<=N} j_l(k rho) sum_m alpha_lm Y_l^m(theta0, phi0)."""
    if expansion.kind != "sph_harm":
        raise DomainError(f"expected a sph_harm expansion, got {expansion.kind}")
    N = expansion.order
    rho = expansion.radius if rho is None else rho
    jl = spherical_j_at(N, expansion.kernel.k * rho)[0]
    y, _ = sph_harm_table(N, [theta0], [phi0])
    ls = np.concatenate([np.full(2 * l + 1, l) for l in range(N + 1)])
    return complex(np.sum(jl[ls] * expansion.coefficients * y[0]))


# ---------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class QbxParams:
    N: int
    r: float
    M: int = 64
    q: int = 16
    side: str = "interior"
    n_phi: int = 48
    n_theta: int = 96


_COEFFS_2D = {
    "cauchy": (cauchy_coeffs, cauchy_eval),
    "laplace_slp": (laplace_slp_coeffs, laplace_slp_eval),
    "laplace_dlp": (laplace_dlp_coeffs, laplace_dlp_eval),
}


def form_expansion(kernel, geometry, density, placement, params):
    """Step 2 of the pipeline: coefficients about an already placed center."""
    if kernel.dimension == 3:
        if not isinstance(geometry, Sphere):
            raise DomainError("3D kernels need a sphere geometry")
        th0, ph0 = placement.target
        rule = target_sphere_rule(params.n_phi, params.n_theta, th0, ph0, geometry.radius)
        return helmholtz3d_coeffs(geometry, density, placement, params.N, rule, kernel.layer, kernel.k)
    panels = panelize(geometry, params.M)
    rule = gauss_rule(params.q)
    if kernel.family in _COEFFS_2D:
        return _COEFFS_2D[kernel.family][0](geometry, density, placement, params.N, panels, rule)
    return helmholtz2d_coeffs(geometry, density, placement, params.N, panels, rule, kernel.layer, kernel.k)


def evaluate_expansion(expansion, point):
    """Step 3: the truncated series at ``point`` (complex in 2D, 3-vector in 3D)."""
    if expansion.kind == "sph_harm":
        rho, th, ph = angles_of(np.asarray(point, dtype=float) - expansion.center)
        return helmholtz3d_eval(expansion, float(th), float(ph), float(rho))
    d = complex(point) - expansion.center
    rho, th = abs(d), math.atan2(d.imag, d.real)
    if expansion.kind == "taylor":
        return complex(cauchy_eval(expansion, th, rho))
    if expansion.kind == "log_series":
        return complex(laplace_slp_eval(expansion, th, rho))
    if expansion.kind == "taylor_dlp":
        return complex(laplace_dlp_eval(expansion, th, rho))
    return helmholtz2d_eval(expansion, th, rho)


def eval_on_surface(kernel, geometry, density, target, params):
    """One-sided limit of the layer potential at a boundary point.

    Places the tangent ball (on ``params.side``), forms the local expansion by
    smooth quadrature and sums it at the tangency point. ``target`` is the
    curve parameter t0 in 2D or (theta0, phi0) in 3D.
    """
    panel = None
    if not isinstance(geometry, Sphere):
        panel = panel_containing(panelize(geometry, params.M), target)
    placement = place_center(geometry, target, params.r, params.side, panel=panel)
    expansion = form_expansion(kernel, geometry, density, placement, params)
    return evaluate_expansion(expansion, placement.target_point)
