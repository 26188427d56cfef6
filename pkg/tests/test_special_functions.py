import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qbxlocal.errors import CapabilityError, DomainError
from qbxlocal.quadrature import sphere_rule
from qbxlocal.special_functions import (
    bessel_batch,
    bessel_j_at,
    bessel_jy,
    hankel1,
    hankel1_with_derivative,
    sph_harm,
    sph_harm_grad,
    sph_harm_table,
    sph_index,
    spherical_bessel_batch,
    spherical_hankel1_with_derivative,
    spherical_j_at,
    spherical_jy,
)


def test_series_values():
    b = bessel_batch(1, 1.0)
    assert b.j_values[0] == pytest.approx(0.7651976865579666, abs=1e-14)
    assert b.j_values[1] == pytest.approx(0.4400505857449335, abs=1e-14)
    assert hankel1(1, [1.0])[0, 1].real == pytest.approx(0.4400505857449335, abs=1e-14)


def test_against_scipy(each_backend):
    x = np.geomspace(0.05, 80, 120)
    J, Y = bessel_jy(60, x)
    n = np.arange(61)
    ref_j = sp.jv(n[None, :], x[:, None])
    ref_y = sp.yv(n[None, :], x[:, None])
    # compare where the functions are representable
    ok = np.abs(ref_y) < 1e250
    assert np.max(np.abs(J - ref_j) / np.maximum(1, np.abs(ref_j))) < 1e-12
    assert np.max(np.abs((Y - ref_y)[ok]) / np.maximum(1, np.abs(ref_y[ok]))) < 1e-11


def test_spherical_against_scipy(each_backend):
    x = np.geomspace(0.05, 60, 100)
    j, y = spherical_jy(30, x)
    l = np.arange(31)
    ref_j = sp.spherical_jn(l[None, :], x[:, None])
    ref_y = sp.spherical_yn(l[None, :], x[:, None])
    ok = np.abs(ref_y) < 1e250
    assert np.max(np.abs(j - ref_j)) < 1e-13
    assert np.max(np.abs((y - ref_y)[ok]) / np.maximum(1, np.abs(ref_y[ok]))) < 1e-11


def test_wronskian_cylindrical():
    x = np.linspace(0.1, 50, 400)
    J, Y = bessel_jy(31, x)
    w = J[:, 1:] * Y[:, :-1] - J[:, :-1] * Y[:, 1:]
    assert np.max(np.abs(w * np.pi * x[:, None] / 2 - 1)) < 1e-10


def test_derivatives_match_finite_differences():
    x = np.array([0.7, 3.0, 11.0])
    eps = 1e-6
    _, dh = hankel1_with_derivative(6, x)
    fd = (hankel1(6, x + eps) - hankel1(6, x - eps)) / (2 * eps)
    assert np.max(np.abs(dh - fd) / np.abs(fd)) < 1e-7
    _, dhs = spherical_hankel1_with_derivative(6, x)
    j1, y1 = spherical_jy(6, x + eps)
    j0, y0 = spherical_jy(6, x - eps)
    fds = ((j1 + 1j * y1) - (j0 + 1j * y0)) / (2 * eps)
    assert np.max(np.abs(dhs - fds) / np.abs(fds)) < 1e-7


def test_zero_argument_limits():
    assert bessel_j_at(3, 0.0)[0].tolist() == [1.0, 0.0, 0.0, 0.0]
    assert spherical_j_at(2, 0.0)[0].tolist() == [1.0, 0.0, 0.0]
    _, h = spherical_bessel_batch(0, 1.0)
    assert h[0] == pytest.approx(-1j * np.exp(1j), abs=1e-15)


def test_domain_and_capability_errors():
    with pytest.raises(DomainError):
        bessel_jy(3, [0.0])
    with pytest.raises(DomainError):
        bessel_jy(3, [-1.0])
    with pytest.raises(CapabilityError):
        bessel_jy(201, [1.0])
    with pytest.raises(DomainError):
        sph_harm(2, 3, 0.1, 0.2)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 50.0), st.integers(1, 40))
def test_neumann_sum_rule(x, n):
    J, _ = bessel_jy(max(n, 2 * int(x) + 60), [x])
    assert J[0, 0] + 2 * np.sum(J[0, 2::2]) == pytest.approx(1.0, abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 50.0), st.integers(1, 30))
def test_three_term_recurrence(x, n):
    J, Y = bessel_jy(n + 1, [x])
    for F in (J[0], Y[0]):
        lhs = F[n - 1] + F[n + 1]
        assert lhs == pytest.approx(2 * n / x * F[n], rel=1e-10, abs=1e-12 * np.max(np.abs(F)))


def test_sph_harm_against_scipy(each_backend):
    th = np.linspace(0.1, 6.0, 9)
    ph = np.linspace(0.2, 2.9, 9)
    val, _ = sph_harm_table(12, th, ph)
    for l in range(13):
        for m in range(-l, l + 1):
            ref = sp.sph_harm_y(l, m, ph, th)
            assert np.max(np.abs(val[:, sph_index(l, m)] - ref)) < 1e-12


def test_pointwise_sum_rule():
    th = np.linspace(0.0, 6.2, 7)
    ph = np.linspace(0.05, 3.1, 7)
    val, _ = sph_harm_table(20, th, ph)
    for l in range(21):
        block = val[:, l * l:(l + 1) ** 2]
        s = np.sum(np.abs(block) ** 2, axis=1)
        assert np.max(np.abs(s - (2 * l + 1) / (4 * math.pi))) < 1e-12


def test_sphere_rule_orthonormality():
    rule = sphere_rule(16, 32)
    val, _ = sph_harm_table(12, rule.theta, rule.phi)
    gram = (val.conj().T * rule.weights) @ val
    assert np.max(np.abs(gram - np.eye(gram.shape[0]))) < 1e-10


def test_polar_derivative_and_gradient():
    th, ph, eps = 0.9, 1.3, 1e-6
    for l, m in [(1, 1), (4, -2), (7, 3)]:
        v = sph_harm(l, m, th, ph)
        fd = (sph_harm(l, m, th, ph + eps).value - sph_harm(l, m, th, ph - eps).value) / (2 * eps)
        assert abs(v.d_phi - fd) < 1e-8
        g = sph_harm_grad(l, m, th, ph)
        # the surface gradient is tangent to the sphere
        r_hat = np.array([math.sin(ph) * math.cos(th), math.sin(ph) * math.sin(th), math.cos(ph)])
        assert abs(np.dot(g, r_hat)) < 1e-13


def test_raising_ladder():
    th, ph = 0.7, 1.1
    for l in range(11):
        for m in range(-l, l):
            v = sph_harm(l, m, th, ph)
            up = sph_harm(l, m + 1, th, ph).value
            L = np.exp(1j * th) * (v.d_phi + 1j / math.tan(ph) * v.d_theta)
            assert abs(L - math.sqrt((l - m) * (l + m + 1)) * up) < 1e-9


def test_spherical_j_small_arguments():
    from qbxlocal.special_functions import spherical_j_at
    x = np.array([0.0, 1e-300, 1e-9, 2e-8, 1e-3])
    out = spherical_j_at(4, x)
    assert np.all(np.isfinite(out))
    for l in range(5):
        assert np.allclose(out[:, l], sp.spherical_jn(l, x), rtol=5e-14, atol=1e-299)
