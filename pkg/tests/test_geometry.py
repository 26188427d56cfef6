import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbxlocal.errors import DomainError, PlacementError
from qbxlocal.geometry import (
    Sphere,
    circle,
    ellipse,
    make_curve,
    panel_containing,
    panelize,
    place_center,
    starfish,
)


def test_curve_examples():
    e = ellipse(2, 1)
    assert complex(e.w(math.pi / 2)) == pytest.approx(1j, abs=1e-15)
    assert float(e.speed(math.pi / 2)) == pytest.approx(2.0, abs=1e-15)
    assert abs(starfish(1, 0.3, 5).w(0.0)) == pytest.approx(1.3, abs=1e-15)


def test_normals_point_outward():
    for curve in (circle(1.5), ellipse(2, 0.5), starfish(1, 0.3, 5)):
        t = np.linspace(0, 2 * np.pi, 200, endpoint=False)
        w = curve.w(t)
        centroid = np.mean(w)
        # outward on star-shaped curves: normal has positive component along w - centroid
        assert np.all(np.real(curve.normal(t) * np.conj(w - centroid)) > 0)


def test_arc_lengths():
    assert circle(2).arc_length() == pytest.approx(4 * math.pi, rel=1e-14)
    # Ramanujan-free check: ellipse(2,1) perimeter from a reference value
    assert ellipse(2, 1).arc_length() == pytest.approx(9.688448220547675, rel=1e-13)


def test_curvature():
    assert float(circle(0.5).curvature(1.0)) == pytest.approx(2.0)
    e = ellipse(2, 1)
    assert float(e.curvature(0.0)) == pytest.approx(2.0)
    assert float(e.curvature(math.pi / 2)) == pytest.approx(0.25)


def test_place_center_examples():
    c = circle(1)
    p = place_center(c, 0.0, 0.25)
    assert p.center == pytest.approx(0.75)
    p = place_center(c, math.pi / 2, 0.1, "exterior")
    assert p.center == pytest.approx(1.1j)
    with pytest.raises(PlacementError, match="curvature"):
        place_center(c, 0.0, 3.0)
    with pytest.raises(DomainError):
        place_center(c, 0.0, 0.1, side="above")


def test_panel_bound_is_local():
    sf = starfish(1, 0.3, 5)
    panels = panelize(sf, 256)
    t0 = math.pi / 10
    place_center(sf, t0, 0.125, panel=panel_containing(panels, t0))
    with pytest.raises(PlacementError):
        place_center(sf, 0.0, 0.125, panel=panel_containing(panels, 0.0))


def test_panelize():
    sf = starfish(1, 0.3, 5)
    p = panelize(sf, 64)
    assert p.count == 64
    assert p.h * 64 == pytest.approx(p.arc_length, rel=1e-12)
    assert p.intervals[0, 0] == 0.0 and p.intervals[-1, 1] == pytest.approx(2 * math.pi)
    with pytest.raises(DomainError):
        panelize(sf, 0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2 * math.pi, exclude_max=True), st.integers(1, 200))
def test_panel_containing(t, M):
    p = panelize(circle(1), M)
    a, b = panel_containing(p, t)
    assert a <= t <= b + 1e-15
    assert b - a == pytest.approx(2 * math.pi / M)


def test_bad_parameters():
    with pytest.raises(DomainError):
        make_curve("square", 1)
    with pytest.raises(DomainError):
        starfish(1, 1.2, 5)
    with pytest.raises(DomainError):
        Sphere(-1)


def test_sphere_placement():
    s = Sphere(1.0)
    p = place_center(s, (0.3, 1.0), 0.2)
    assert np.linalg.norm(p.center) == pytest.approx(0.8)
    with pytest.raises(PlacementError):
        place_center(s, (0.3, 1.0), 0.6)
