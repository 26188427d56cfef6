
import numpy as np
import pytest

from qbxlocal import set_backend
from qbxlocal.bie import demo_bie, dlp_qbx_matrix
from qbxlocal.errors import DomainError
from qbxlocal.geometry import circle, ellipse, panelize, starfish


def re_power(n):
    return lambda z: np.real(np.asarray(z) ** n)


def test_circle_linear_data():
    res = demo_bie(circle(1), re_power(1), M=64, q=8, N=4)
    assert res.max_error < 1e-6
    assert np.all(np.abs(res.probes) <= 0.5 + 1e-15)


def test_zero_data():
    res = demo_bie(circle(1), lambda z: np.zeros(np.shape(z)), M=32, q=8, N=4)
    assert np.all(res.density == 0)
    assert res.max_error == 0


def test_starfish_cubic_data():
    res = demo_bie(starfish(1, 0.3, 5), re_power(3), M=128, q=16, N=4, r=0.1)
    assert res.max_error < 1e-5


def test_non_polynomial_data():
    res = demo_bie(ellipse(1.5, 1.0), lambda z: np.real(np.exp(np.asarray(z))), M=64, q=16, N=8, r=0.1)
    assert res.max_error < 1e-8


def test_constant_density_row_sums():
    # interior limit of the double layer of phi = 1 is -1 at every node
    A, _ = dlp_qbx_matrix(circle(1), 32, 8, 4, 0.2)
    assert np.allclose(A.sum(axis=1), -1.0, atol=1e-10)


def test_oversized_ball_rejected():
    with pytest.raises(DomainError):
        # r = 4h balls near the inner arms reach across to the neighbouring arm
        dlp_qbx_matrix(starfish(1, 0.3, 5), 32, 8, 4, 4 * panelize(starfish(1, 0.3, 5), 32).h)


def test_backends_agree():
    old = set_backend("numpy")
    a, _ = dlp_qbx_matrix(starfish(1, 0.3, 5), 64, 8, 5, 0.05)
    set_backend("numba")
    b, _ = dlp_qbx_matrix(starfish(1, 0.3, 5), 64, 8, 5, 0.05)
    set_backend(old)
    assert np.allclose(a, b, rtol=0, atol=1e-13)
