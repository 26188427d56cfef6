"""Interior Dirichlet Laplace problem via a double-layer Nystrom discretization.

The unknown density lives at the composite Gauss nodes. Row i of the system
matrix is the interior QBX limit of the double layer at node i, so the jump
term is produced by the expansion itself and never added by hand.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._jit import dispatch, njit
from .errors import DomainError, NumericError
from .geometry import CURVATURE_SAFETY, panelize
from .quadrature import gauss_rule, panel_nodes


@njit
def _dlp_rows_jit(z, inv0, coef, N):
    nt, ns = inv0.shape
    out = np.empty((nt, ns))
    for i in range(nt):
        zi = z[i]
        for n in range(ns):
            inv = inv0[i, n]
            p = inv
            acc = 0j
            zp = 1.0 + 0j
            for _ in range(N + 1):
                acc += p * zp
                p *= inv
                zp *= zi
            out[i, n] = -(coef[n] * acc).imag
    return out


def _dlp_rows_np(z, inv0, coef, N):
    acc = np.zeros(inv0.shape, dtype=complex)
    p = inv0.copy()
    zp = np.ones(len(z), dtype=complex)
    for _ in range(N + 1):
        acc += p * zp[:, None]
        p = p * inv0
        zp = zp * z
    return -np.imag(coef[None, :] * acc)


def dlp_qbx_matrix(curve, M, q, N, r):
    """Matrix of interior QBX double-layer limits, targets = sources = Gauss nodes.

    ``r`` is the requested expansion radius; at each target it is capped by
    the curvature bound of that target's panel.
    """
    panels = panelize(curve, M)
    nodes = panel_nodes(curve, panels, gauss_rule(q))
    kappa = np.abs(curve.curvature(np.linspace(0, 2 * math.pi, 64 * M, endpoint=False)))
    kappa_panel = kappa.reshape(M, 64).max(axis=1)
    radii = np.minimum(r, CURVATURE_SAFETY / np.repeat(kappa_panel, q))
    normals = -1j * nodes.dw / nodes.speed
    centers = nodes.w - radii * normals
    z = nodes.w - centers
    inv0 = 1.0 / (nodes.w[None, :] - centers[:, None])
    if np.any(np.abs(inv0) * radii[:, None] > 1 + 1e-12):
        raise DomainError("a source node lies inside an expansion ball; refine the panels")
    coef = nodes.dw * nodes.weights / (2 * math.pi)
    A = dispatch(_dlp_rows_jit, _dlp_rows_np)(np.ascontiguousarray(z), np.ascontiguousarray(inv0),
                                              np.ascontiguousarray(coef), int(N))
    return A, nodes


@dataclass(frozen=True)
class BieResult:
    max_error: float
    density: np.ndarray
    probes: np.ndarray
    residual: float


def demo_bie(curve, exact, M=64, q=8, N=4, r=None, probes=None):
    """Solve the interior Dirichlet problem with data ``exact`` on the boundary.

    ``exact`` maps complex points to real values and must be harmonic inside.
    Returns the max error at the interior ``probes`` (default: 32 points on
    a circle of radius 0.5).
    """
    if r is None:
        r = 4 * panelize(curve, M).h
    A, nodes = dlp_qbx_matrix(curve, M, q, N, r)
    f = np.asarray(exact(nodes.w), dtype=float)
    try:
        mu = np.linalg.solve(A, f)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"dense solve failed: {exc}") from exc
    residual = float(np.max(np.abs(A @ mu - f), initial=0.0))
    if probes is None:
        probes = 0.5 * np.exp(2j * math.pi * np.arange(32) / 32)
    probes = np.asarray(probes, dtype=complex)
    # probes sit well inside, so the smooth panel rule is accurate there
    diff = nodes.w[None, :] - probes[:, None]
    u = -np.imag(nodes.dw[None, :] / diff) @ (mu * nodes.weights) / (2 * math.pi)
    err = float(np.max(np.abs(u - exact(probes)), initial=0.0))
    return BieResult(err, mu, probes, residual)
