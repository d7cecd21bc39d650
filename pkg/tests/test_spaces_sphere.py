"""Round sphere and its antipodal quotient."""

import math

import numpy as np
import pytest

from geopursuit import (
    DegenerateLogError,
    OutOfInjectivityError,
    ProjectivePlane,
    Sphere,
    dist,
    end_tangent,
    exp,
    geodesic,
    geodesic_eval,
    log,
)
from conftest import close_pair


def test_pole_to_equator_quarter_arc(sphere):
    p = sphere.point((0.0, 0.0, 1.0))
    q = sphere.point((1.0, 0.0, 0.0))
    assert dist(p, q) == pytest.approx(math.pi / 2, abs=1e-12)
    v = log(p, q)
    assert v.norm() == pytest.approx(math.pi / 2, abs=1e-12)
    assert np.allclose(v.components, (math.pi / 2, 0.0, 0.0), atol=1e-12)


def test_exp_by_half_turn_reaches_antipode(sphere):
    p = sphere.point((0.0, 0.0, 1.0))
    v = sphere.tangent(p, (math.pi, 0.0, 0.0))
    assert np.allclose(exp(p, v).coords, (0.0, 0.0, -1.0), atol=1e-12)


def test_quarter_arc_end_tangent_points_onward(sphere):
    p = sphere.point((0.0, 0.0, 1.0))
    q = sphere.point((1.0, 0.0, 0.0))
    e = end_tangent(geodesic(p, q))
    # at q the great circle continues toward the south pole
    assert np.allclose(e.components, (0.0, 0.0, -math.pi / 2), atol=1e-12)
    assert e.norm() == pytest.approx(math.pi / 2, abs=1e-12)


def test_antipodal_log_rejected(sphere):
    p = sphere.point((0.0, 0.0, 1.0))
    q = sphere.point((0.0, 0.0, -1.0))
    with pytest.raises(OutOfInjectivityError):
        log(p, q)


def test_radius_scales_metric():
    s2 = Sphere(radius=2.0)
    p = s2.point((0.0, 0.0, 1.0))
    q = s2.point((1.0, 0.0, 0.0))
    assert dist(p, q) == pytest.approx(math.pi, abs=1e-12)
    v = log(p, q)
    assert v.norm() == pytest.approx(math.pi, abs=1e-12)
    # chart components stay angle-sized; the metric supplies the factor r
    assert np.allclose(v.components, (math.pi / 2, 0.0, 0.0), atol=1e-12)


def test_geodesic_stays_on_great_circle(sphere):
    p = sphere.point((0.0, 0.0, 1.0))
    q = sphere.point((math.sin(1.0), 0.0, math.cos(1.0)))
    seg = geodesic(p, q)
    for s in np.linspace(0.0, 1.0, 9):
        x = geodesic_eval(seg, s)
        assert abs(np.linalg.norm(x.coords) - 1.0) < 1e-12
        assert abs(x.coords[1]) < 1e-12
        assert dist(p, x) == pytest.approx(s * seg.length, abs=1e-10)


def test_sphere_roundtrip_random_pairs(sphere):
    rng = np.random.default_rng(1)
    for _ in range(200):
        p, q = close_pair(sphere, rng)
        v = log(p, q)
        back = exp(p, v)
        assert sphere.dist(back, q) < 1e-9
        assert abs(v.norm() - dist(p, q)) < 1e-12


# ------------------------------------------------------------------ RP^2


def test_projective_log_uses_nearer_lift(rp2):
    p = rp2.point((0.0, 0.0, 1.0))
    q = rp2.point((math.sin(1.6), 0.0, math.cos(1.6)))
    # 1.6 radians along the sphere passes the halfway mark, so the
    # identified copy on the other side is closer
    v = log(p, q)
    assert v.norm() == pytest.approx(math.pi - 1.6, abs=1e-12)
    u = v.components / np.linalg.norm(v.components)
    assert np.allclose(u, (-1.0, 0.0, 0.0), atol=1e-12)
    assert dist(p, q) == pytest.approx(math.pi - 1.6, abs=1e-12)


def test_projective_representative_invariance(rp2):
    rng = np.random.default_rng(9)
    for _ in range(100):
        x = rng.normal(size=3)
        x = x / np.linalg.norm(x)
        a = rp2.point(x)
        b = rp2.point(-x)
        assert np.array_equal(a.coords, b.coords)


def test_projective_log_at_identical_class_degenerate(rp2):
    p = rp2.point((0.0, 0.0, 1.0))
    with pytest.raises(DegenerateLogError):
        log(p, rp2.point((0.0, 0.0, -1.0)))


def test_projective_perpendicular_points_at_lift_tie(rp2):
    p = rp2.point((0.0, 0.0, 1.0))
    q = rp2.point((1.0, 0.0, 0.0))
    assert dist(p, q) == pytest.approx(math.pi / 2, abs=1e-12)
    with pytest.raises(OutOfInjectivityError):
        log(p, q)


def test_projective_injectivity_is_half_of_sphere(rp2, sphere):
    assert rp2.injectivity_radius == pytest.approx(sphere.injectivity_radius / 2)
    assert rp2.shortest_closed_geodesic == pytest.approx(math.pi)


def test_projective_roundtrip_random_pairs(rp2):
    rng = np.random.default_rng(2)
    for _ in range(200):
        p, q = close_pair(rp2, rng)
        v = log(p, q)
        back = exp(p, v)
        assert rp2.dist(back, q) < 1e-9
        assert abs(v.norm() - dist(p, q)) < 1e-12


def test_projective_dist_agrees_with_sphere_lift_minimum(rp2, sphere):
    rng = np.random.default_rng(3)
    for _ in range(200):
        a = rng.normal(size=3)
        a = a / np.linalg.norm(a)
        b = rng.normal(size=3)
        b = b / np.linalg.norm(b)
        p, q = rp2.point(a), rp2.point(b)
        sp = sphere.point(a)
        d_lifts = min(sphere.dist(sp, sphere.point(b)), sphere.dist(sp, sphere.point(-b)))
        assert dist(p, q) == pytest.approx(d_lifts, abs=1e-9)


def test_projective_radius_scaling():
    r = 2.5
    rp = ProjectivePlane(radius=r)
    assert rp.injectivity_radius == pytest.approx(math.pi * r / 2)
    assert rp.convexity_radius == pytest.approx(math.pi * r / 4)
    p = rp.point((0.0, 0.0, 1.0))
    q = rp.point((math.sin(0.4), 0.0, math.cos(0.4)))
    assert dist(p, q) == pytest.approx(0.4 * r, abs=1e-12)


def test_chase_logs_agree_with_scalar_log(sphere, rp2):
    rng = np.random.default_rng(4)
    for space in (sphere, rp2):
        pairs = [close_pair(space, rng) for _ in range(20)]
        P = np.array([p.coords for p, _ in pairs])
        Q = np.array([q.coords for _, q in pairs])
        V, D, E, carry = space.chase_logs(P, Q)
        assert carry is None
        for k, (p, q) in enumerate(pairs):
            v = log(p, q)
            assert np.allclose(V[k], v.components, atol=1e-12)
            assert D[k] == pytest.approx(v.norm(), abs=1e-12)
            e = end_tangent(geodesic(p, q))
            unit = e.components / e.norm()
            assert np.allclose(E[k], unit, atol=1e-9)
