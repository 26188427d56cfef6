"""Closed boundaries and QBX center placement.

Curves are stored as complex-valued parametrizations w(t), t in [0, 2*pi),
oriented counterclockwise so the outward normal is -i w'/|w'|. The only
surface is the sphere centered at the origin.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, PlacementError

TWO_PI = 2.0 * math.pi
CURVATURE_SAFETY = 0.5


@dataclass(frozen=True)
class ParametricCurve:
    name: str
    params: tuple
    position: Callable = field(repr=False)
    derivative: Callable = field(repr=False)
    second_derivative: Callable = field(repr=False)

    def w(self, t):
        return self.position(np.asarray(t, dtype=float))

    def dw(self, t):
        return self.derivative(np.asarray(t, dtype=float))

    def d2w(self, t):
        return self.second_derivative(np.asarray(t, dtype=float))

    def speed(self, t):
        return np.abs(self.dw(t))

    def normal(self, t):
        """Outward unit normal as a complex number."""
        d = self.dw(t)
        return -1j * d / np.abs(d)

    def curvature(self, t):
        """Signed curvature; positive where the boundary is convex."""
        d = self.dw(t)
        dd = self.d2w(t)
        return np.imag(np.conj(d) * dd) / np.abs(d) ** 3

    def arc_length(self):
        from .quadrature import adaptive_integrate
        value, _ = adaptive_integrate(self.speed, 0.0, TWO_PI, tol=1e-14)
        return float(np.real(value))

    def describe(self):
        return f"{self.name}({', '.join(repr(p) for p in self.params)})"


def circle(radius=1.0):
    if not radius > 0:
        raise DomainError(f"circle radius must be positive, got {radius}")
    R = float(radius)
    return ParametricCurve(
        "circle", (R,),
        lambda t: R * np.exp(1j * t),
        lambda t: 1j * R * np.exp(1j * t),
        lambda t: -R * np.exp(1j * t),
    )


def ellipse(a, b):
    if not (a > 0 and b > 0):
        raise DomainError(f"ellipse semi-axes must be positive, got {a}, {b}")
    a, b = float(a), float(b)
    return ParametricCurve(
        "ellipse", (a, b),
        lambda t: a * np.cos(t) + 1j * b * np.sin(t),
        lambda t: -a * np.sin(t) + 1j * b * np.cos(t),
        lambda t: -a * np.cos(t) - 1j * b * np.sin(t),
    )


def starfish(radius=1.0, amplitude=0.3, arms=5):
    """Polar curve rho(t) = radius * (1 + amplitude * cos(arms * t))."""
    if not radius > 0:
        raise DomainError(f"starfish radius must be positive, got {radius}")
    if not 0 <= amplitude < 1:
        raise DomainError(f"starfish amplitude must lie in [0, 1), got {amplitude}")
    if int(arms) != arms or arms < 2:
        raise DomainError(f"starfish arms must be an integer >= 2, got {arms}")
    R, a, n = float(radius), float(amplitude), int(arms)

    def pos(t):
        return R * (1 + a * np.cos(n * t)) * np.exp(1j * t)

    def d1(t):
        e = np.exp(1j * t)
        return R * e * (-a * n * np.sin(n * t) + 1j * (1 + a * np.cos(n * t)))

    def d2(t):
        e = np.exp(1j * t)
        return R * e * (-a * n * n * np.cos(n * t) - 2j * a * n * np.sin(n * t)
                        - (1 + a * np.cos(n * t)))

    return ParametricCurve("starfish", (R, a, n), pos, d1, d2)


CURVES = {"circle": circle, "ellipse": ellipse, "starfish": starfish}


def make_curve(kind, *params):
    try:
        factory = CURVES[kind]
    except KeyError:
        raise DomainError(f"unknown curve {kind!r}; expected one of {sorted(CURVES)}") from None
    return factory(*params)


@dataclass(frozen=True)
class Sphere:
    """Sphere of the given radius centered at the origin.

    Surface points are R * omega(theta, phi) with theta the azimuth.
    """

    radius: float = 1.0
    name: str = "sphere"

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"sphere radius must be positive, got {self.radius}")

    @property
    def params(self):
        return (self.radius,)

    def position(self, theta, phi):
        return self.radius * omega(theta, phi)

    def normal(self, theta, phi):
        return omega(theta, phi)

    def area_element(self, theta, phi):
        return self.radius ** 2 * np.sin(phi)

    def curvature_max(self):
        return 1.0 / self.radius

    def area(self):
        return 4.0 * math.pi * self.radius ** 2

    def describe(self):
        return f"sphere({self.radius!r})"


ParametricSurface = Sphere


def omega(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)], axis=-1)


def angles_of(v):
    """(r, theta, phi) of Cartesian vectors ``v[..., 3]``."""
    v = np.asarray(v, dtype=float)
    r = np.linalg.norm(v, axis=-1)
    theta = np.mod(np.arctan2(v[..., 1], v[..., 0]), TWO_PI)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_phi = np.where(r > 0, v[..., 2] / np.where(r > 0, r, 1.0), 1.0)
    phi = np.arccos(np.clip(cos_phi, -1.0, 1.0))
    return r, theta, phi


def make_surface(kind, *params):
    if kind != "sphere":
        raise DomainError(f"unknown surface {kind!r}; only 'sphere' is available")
    return Sphere(*[float(p) for p in params])


@dataclass(frozen=True)
class CenterPlacement:
    target: object
    radius: float
    center: object
    side: str
    target_point: object


def _local_curvature(curve, t0, r, panel):
    if panel is None:
        # parameter window covering roughly 2r of arc on either side
        half = min(math.pi, 2.0 * r / max(float(curve.speed(t0)), 1e-300) + 1e-3)
        a, b = t0 - half, t0 + half
    else:
        a, b = panel
    ts = np.linspace(a, b, 257)
    return float(np.max(np.abs(curve.curvature(ts))))


def place_center(curve, t0, r, side="interior", panel=None):
    """Center of the tangent ball of radius r touching the curve at w(t0)."""
    if side not in ("interior", "exterior"):
        raise DomainError(f"side must be 'interior' or 'exterior', got {side!r}")
    if isinstance(curve, Sphere):
        return place_center_3d(curve, t0[0], t0[1], r, side)
    if not r > 0:
        raise DomainError(f"expansion radius must be positive, got {r}")
    kappa = _local_curvature(curve, t0, r, panel)
    if kappa > 0 and r > CURVATURE_SAFETY / kappa:
        raise PlacementError(
            f"radius {r} exceeds curvature bound {CURVATURE_SAFETY}/kappa = "
            f"{CURVATURE_SAFETY / kappa:.6g} (local max curvature {kappa:.6g})")
    x0 = complex(curve.w(t0))
    n = complex(curve.normal(t0))
    xc = x0 - r * n if side == "interior" else x0 + r * n
    return CenterPlacement(float(t0), float(r), xc, side, x0)


def place_center_3d(surface, theta0, phi0, r, side="interior"):
    if not r > 0:
        raise DomainError(f"expansion radius must be positive, got {r}")
    bound = CURVATURE_SAFETY / surface.curvature_max()
    if r > bound:
        raise PlacementError(
            f"radius {r} exceeds curvature bound {CURVATURE_SAFETY}/kappa = {bound:.6g}")
    x0 = surface.position(theta0, phi0)
    n = surface.normal(theta0, phi0)
    xc = x0 - r * n if side == "interior" else x0 + r * n
    return CenterPlacement((float(theta0), float(phi0)), float(r), xc, side, x0)


@dataclass(frozen=True)
class Panelization:
    intervals: np.ndarray
    h: float
    arc_length: float

    @property
    def count(self):
        return len(self.intervals)


def panelize(curve, M):
    """M equal parameter panels covering [0, 2*pi); h is arc length per panel."""
    if int(M) != M or M < 1:
        raise DomainError(f"panel count must be a positive integer, got {M}")
    M = int(M)
    edges = np.linspace(0.0, TWO_PI, M + 1)
    intervals = np.stack([edges[:-1], edges[1:]], axis=1)
    intervals.setflags(write=False)
    L = curve.arc_length()
    return Panelization(intervals, L / M, L)


def panel_containing(panels, t0):
    """The (a, b) parameter interval of ``panels`` that contains t0 (taken mod 2*pi)."""
    intervals = panels.intervals
    t = float(np.mod(t0, TWO_PI))
    i = int(np.searchsorted(intervals[:, 1], t, side="right"))
    i = min(i, len(intervals) - 1)
    a, b = intervals[i]
    shift = float(t0) - t
    return a + shift, b + shift
