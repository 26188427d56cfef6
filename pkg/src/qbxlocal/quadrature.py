"""Gauss-Legendre panel rules, sphere rules and an adaptive reference integrator."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapabilityError, ConvergenceFailure, DomainError, EvaluationError
from .geometry import TWO_PI, angles_of, omega

MAX_GAUSS_ORDER = 64
MAX_PANELS = 4096


@dataclass(frozen=True)
class GaussRule:
    q: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def _gauss_legendre(q):
    i = np.arange(1, q + 1)
    x = np.cos(np.pi * (i - 0.25) / (q + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for n in range(2, q + 1):
            p0, p1 = p1, ((2 * n - 1) * x * p1 - (n - 1) * p0) / n
        dp = q * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for n in range(2, q + 1):
        p0, p1 = p1, ((2 * n - 1) * x * p1 - (n - 1) * p0) / n
    dp = q * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # ascending and exactly symmetric
    x, w = x[::-1], w[::-1]
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_rule(q):
    """q-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_q)."""
    if int(q) != q or not 1 <= q <= MAX_GAUSS_ORDER:
        raise CapabilityError(f"Gauss order must be an integer in [1, {MAX_GAUSS_ORDER}], got {q}")
    x, w = _gauss_legendre(int(q))
    return GaussRule(int(q), x, w)


@dataclass(frozen=True)
class PanelNodes:
    """Composite rule on a curve: parameters, weights and curve data at every node.

    Arrays are flat in panel-major, node-minor order.
    """

    t: np.ndarray
    weights: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    speed: np.ndarray
    M: int
    q: int

    @property
    def arc_weights(self):
        return self.weights * self.speed


def panel_nodes(curve, panels, rule):
    intervals = np.asarray(getattr(panels, "intervals", panels), dtype=float)
    if len(intervals) > MAX_PANELS:
        raise CapabilityError(f"panel count {len(intervals)} exceeds {MAX_PANELS}")
    a = intervals[:, 0:1]
    b = intervals[:, 1:2]
    half = 0.5 * (b - a)
    t = (0.5 * (a + b) + half * rule.nodes[None, :]).ravel()
    wts = (half * rule.weights[None, :]).ravel()
    dw = curve.dw(t)
    return PanelNodes(t, wts, curve.w(t), dw, np.abs(dw), len(intervals), rule.q)


def _check_finite(values, q):
    finite = np.isfinite(values)
    if values.ndim > 1:
        finite = finite.all(axis=tuple(range(1, values.ndim)))
    if not finite.all():
        bad = int(np.argmin(finite))
        panel, node = divmod(bad, q)
        raise EvaluationError(f"non-finite integrand at panel {panel}, node {node}",
                              panel=panel, node=node)


def composite_integrate(curve, panels, rule, integrand):
    """Sum of integrand(t_n) |w'(t_n)| w_n over all panels and nodes.

    ``integrand`` is called once with the flat array of node parameters and
    may return shape ``(n,)`` or ``(n, k)``.
    """
    nodes = panel_nodes(curve, panels, rule)
    values = np.asarray(integrand(nodes.t))
    _check_finite(values, rule.q)
    aw = nodes.arc_weights
    if values.ndim == 1:
        return np.sum(values * aw)
    return np.sum(values * aw.reshape((-1,) + (1,) * (values.ndim - 1)), axis=0)


# ---------------------------------------------------------------------------
# sphere rules


@dataclass(frozen=True)
class SphereRule:
    """Tensor rule on a sphere; ``weights`` include the area element."""

    n_phi: int
    n_theta: int
    radius: float
    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray

    def points(self):
        return self.radius * omega(self.theta, self.phi)

    def normals(self):
        return omega(self.theta, self.phi)


def _check_sphere_sizes(n_phi, n_theta):
    if not 1 <= n_phi <= MAX_GAUSS_ORDER:
        raise CapabilityError(f"n_phi must lie in [1, {MAX_GAUSS_ORDER}], got {n_phi}")
    if n_theta < 1:
        raise DomainError(f"n_theta must be positive, got {n_theta}")


def sphere_rule(n_phi, n_theta, radius=1.0):
    """Gauss-Legendre in cos(phi) times the trapezoidal rule in theta."""
    _check_sphere_sizes(n_phi, n_theta)
    g = gauss_rule(n_phi)
    phi = np.arccos(-g.nodes)
    theta = TWO_PI * np.arange(n_theta) / n_theta
    P, T = np.meshgrid(phi, theta, indexing="ij")
    W = np.repeat((g.weights[::-1] * (TWO_PI / n_theta) * radius ** 2)[:, None], n_theta, axis=1)
    return SphereRule(n_phi, n_theta, float(radius), T.ravel(), P.ravel(), W.ravel())


def _frame_about(theta0, phi0):
    e3 = omega(theta0, phi0)
    helper = np.array([0.0, 0.0, 1.0]) if abs(e3[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(helper, e3)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    return e1, e2, e3


def target_sphere_rule(n_phi, n_theta, theta0, phi0, radius=1.0, grading=2):
    """Sphere rule whose pole sits at omega(theta0, phi0), graded toward it.

    The polar angle psi about the target is psi = pi * s**grading with
    Gauss-Legendre nodes in s on [0, 1], so nodes cluster near the target
    point. This keeps peaked integrands with width ~r near the target
    resolvable at a fixed node count.
    """
    _check_sphere_sizes(n_phi, n_theta)
    g = gauss_rule(n_phi)
    s = 0.5 * (g.nodes + 1.0)
    psi = np.pi * s ** grading
    dpsi = np.pi * grading * s ** (grading - 1) * 0.5 * g.weights
    chi = TWO_PI * (np.arange(n_theta) + 0.5) / n_theta
    e1, e2, e3 = _frame_about(theta0, phi0)
    sp, cp = np.sin(psi)[:, None], np.cos(psi)[:, None]
    cc, sc = np.cos(chi)[None, :], np.sin(chi)[None, :]
    dirs = (sp * cc)[..., None] * e1 + (sp * sc)[..., None] * e2 + cp[..., None] * e3
    _, theta, phi = angles_of(dirs.reshape(-1, 3))
    W = (radius ** 2) * (np.sin(psi) * dpsi)[:, None] * np.full((1, n_theta), TWO_PI / n_theta)
    return SphereRule(n_phi, n_theta, float(radius), theta, phi, W.ravel())


def sphere_integrate(surface, rule, integrand):
    """Sum of integrand(theta_n, phi_n) * weight_n; weights carry R^2 sin(phi)."""
    if abs(rule.radius - surface.radius) > 1e-14 * surface.radius:
        raise DomainError("sphere rule radius does not match the surface")
    values = np.asarray(integrand(rule.theta, rule.phi))
    _check_finite(values, rule.n_theta)
    if values.ndim == 1:
        return np.sum(values * rule.weights)
    return np.sum(values * rule.weights.reshape((-1,) + (1,) * (values.ndim - 1)), axis=0)


# ---------------------------------------------------------------------------
# adaptive integration

_ADAPT_ORDER = 15


def _panel_sums(f, a, b, x, w):
    """Gauss sums of f on each interval [a_i, b_i]; returns (n_int, ...)."""
    half = 0.5 * (b - a)
    t = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(t.ravel()))
    if not np.all(np.isfinite(vals)):
        raise ConvergenceFailure("non-finite integrand value during adaptive integration")
    tail = vals.shape[1:]
    vals = vals.reshape((len(a), len(x)) + tail)
    ww = (half[:, None] * w[None, :]).reshape((len(a), len(x)) + (1,) * len(tail))
    return np.sum(vals * ww, axis=1), np.sum(np.abs(vals) * ww, axis=1)


def adaptive_integrate(integrand, a, b, tol=1e-12, atol=None, l1_relative=False,
                       initial=8, max_depth=60, max_intervals=200000):
    """Globally adaptive bisection with Gauss-Legendre sums on each half.

    Each interval is integrated once whole and once as two halves; the
    difference is its error estimate. Intervals with the largest estimates
    are bisected until, for every component c of a (possibly vector-valued)
    integrand, the summed estimate is below ``max(tol*|I_c|, atol_c)``.
    ``atol`` defaults to ``tol``; with ``l1_relative`` it becomes
    ``tol * integral of |f_c|``, which suits components that cancel to zero.

    Returns ``(value, error_estimate)``.
    """
    if tol < 1e-15:
        raise DomainError(f"tolerance {tol} below supported minimum 1e-15")
    x, w = _gauss_legendre(_ADAPT_ORDER)
    edges = np.linspace(a, b, initial + 1)
    lo, hi = edges[:-1], edges[1:]
    depth = np.zeros(initial, dtype=int)

    def evaluate(lo, hi):
        mid = 0.5 * (lo + hi)
        whole, _ = _panel_sums(integrand, lo, hi, x, w)
        left, l1a = _panel_sums(integrand, lo, mid, x, w)
        right, l1b = _panel_sums(integrand, mid, hi, x, w)
        fine = left + right
        err = np.abs(whole - fine)
        return fine, err, l1a + l1b

    val, err, l1 = evaluate(lo, hi)
    while True:
        total = np.sum(val, axis=0)
        total_err = np.sum(err, axis=0)
        if l1_relative:
            floor = tol * np.sum(l1, axis=0)
            if atol is not None:
                floor = np.maximum(floor, atol)
        else:
            floor = tol if atol is None else atol
        target = np.maximum(tol * np.abs(total), floor)
        target = np.where(target > 0, target, np.finfo(float).tiny)
        norm_err = err / target
        if norm_err.ndim > 1:
            norm_err = norm_err.reshape(len(lo), -1).max(axis=1)
        if np.all(total_err <= target):
            order = np.argsort(lo, kind="stable")
            value = np.sum(val[order], axis=0)
            return value, total_err
        # bisect the largest contributors until the remainder is below half the target
        order = np.argsort(-norm_err, kind="stable")
        csum = np.cumsum(norm_err[order])
        rest = csum[-1] - csum
        nsplit = int(np.searchsorted(-rest, -0.5)) + 1
        split = np.zeros(len(lo), dtype=bool)
        split[order[:nsplit]] = True
        if np.any(depth[split] >= max_depth):
            raise ConvergenceFailure(f"adaptive integration exceeded depth {max_depth}")
        if len(lo) + nsplit > max_intervals:
            raise ConvergenceFailure(f"adaptive integration exceeded {max_intervals} intervals")
        slo, shi, sdep = lo[split], hi[split], depth[split]
        mid = 0.5 * (slo + shi)
        nlo = np.concatenate([slo, mid])
        nhi = np.concatenate([mid, shi])
        nval, nerr, nl1 = evaluate(nlo, nhi)
        keep = ~split
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        depth = np.concatenate([depth[keep], sdep + 1, sdep + 1])
        val = np.concatenate([val[keep], nval])
        err = np.concatenate([err[keep], nerr])
        l1 = np.concatenate([l1[keep], nl1])
