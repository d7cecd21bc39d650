"""Flat quotient spaces: torus and Mobius band.

Expected values come from a brute-force search over deck-transform images in
the covering plane, computed here independently of the package's own
shortest-representative logic.
"""

import math

import numpy as np
import pytest

from geopursuit import (
    DegenerateLogError,
    FlatTorus,
    MobiusBand,
    OutOfInjectivityError,
    UsageError,
    dist,
    geodesic,
    geodesic_eval,
    log,
)
from conftest import close_pair


def torus_images(q, reach=2):
    """All lattice translates of q with offsets in {-reach..reach}^2."""
    out = []
    for kx in range(-reach, reach + 1):
        for ky in range(-reach, reach + 1):
            out.append(np.asarray(q, float) + (kx, ky))
    return out


def mobius_images(q, reach=2):
    """Glide-power images of q: k applications of (x, y) -> (x+1, -y)."""
    out = []
    for k in range(-reach, reach + 1):
        out.append(np.array([q[0] + k, q[1] * (-1) ** k]))
    return out


def brute_log(p, images):
    """Displacement to the nearest image; the oracle for quotient log."""
    p = np.asarray(p, float)
    best = min(images, key=lambda im: np.linalg.norm(im - p))
    return best - p


# ----------------------------------------------------------------- frozen

# brute_log((0.1, 0.1), torus_images((0.9, 0.9))) -> (-0.2, -0.2), norm sqrt(0.08)
TORUS_LOG = (-0.2, -0.2)
TORUS_DIST = math.sqrt(0.08)

# brute_log((0.95, 0.1), mobius_images((0.1, -0.1))) -> (0.15, 0.0) via the
# k=1 glide image (1.1, 0.1); norm 0.15
MOBIUS_LOG = (0.15, 0.0)
MOBIUS_DIST = 0.15


def test_brute_force_oracle_agrees_with_frozen_values():
    v = brute_log((0.1, 0.1), torus_images((0.9, 0.9)))
    assert np.allclose(v, TORUS_LOG, atol=1e-15)
    assert abs(np.linalg.norm(v) - TORUS_DIST) < 1e-15

    w = brute_log((0.95, 0.1), mobius_images((0.1, -0.1)))
    assert np.allclose(w, MOBIUS_LOG, atol=1e-15)
    assert abs(np.linalg.norm(w) - MOBIUS_DIST) < 1e-15


def test_torus_example_dist_and_log(torus):
    p = torus.point((0.1, 0.1))
    q = torus.point((0.9, 0.9))
    assert dist(p, q) == pytest.approx(TORUS_DIST, abs=1e-12)
    assert np.allclose(log(p, q).components, TORUS_LOG, atol=1e-12)


def test_mobius_example_log(mobius):
    p = mobius.point((0.95, 0.1))
    q = mobius.point((0.1, -0.1))
    v = log(p, q)
    assert np.allclose(v.components, MOBIUS_LOG, atol=1e-12)
    assert v.norm() == pytest.approx(MOBIUS_DIST, abs=1e-12)


@pytest.mark.parametrize("make,images", [
    (FlatTorus, torus_images),
    (MobiusBand, mobius_images),
])
def test_log_matches_brute_force_on_random_pairs(make, images):
    space = make()
    rng = np.random.default_rng(7)
    for _ in range(300):
        p, q = close_pair(space, rng)
        expect = brute_log(p.coords, images(q.coords))
        got = log(p, q).components
        assert np.allclose(got, expect, atol=1e-12)
        assert dist(p, q) == pytest.approx(np.linalg.norm(expect), abs=1e-12)


def test_log_of_identical_point_is_degenerate(torus):
    p = torus.point((0.3, 0.7))
    with pytest.raises(DegenerateLogError):
        log(p, torus.point((0.3, 0.7)))


def test_torus_tie_between_lifts_is_out_of_injectivity(torus):
    p = torus.point((0.0, 0.0))
    q = torus.point((0.5, 0.0))
    with pytest.raises(OutOfInjectivityError):
        log(p, q)
    with pytest.raises(OutOfInjectivityError):
        log(torus.point((0.1, 0.25)), torus.point((0.6, 0.25)))


def test_mobius_points_outside_strip_rejected(mobius):
    with pytest.raises(UsageError):
        mobius.point((0.2, 0.6))


def test_seam_crossing_midpoint(torus):
    seg = geodesic(torus.point((0.9, 0.0)), torus.point((0.1, 0.0)))
    mid = geodesic_eval(seg, 0.5)
    assert np.allclose(mid.coords, (0.0, 0.0), atol=1e-12)
    assert seg.length == pytest.approx(0.2, abs=1e-12)


def test_flat_end_tangent_equals_initial(torus):
    rng = np.random.default_rng(3)
    for _ in range(50):
        p, q = close_pair(torus, rng)
        seg = geodesic(p, q)
        assert np.allclose(seg.initial_tangent.components,
                           torus.end_tangent(seg).components, atol=1e-12)


def test_lifted_midpoint_is_linear(torus, mobius):
    # geodesics lift to straight lines: eval(0.5) equals the lift midpoint
    rng = np.random.default_rng(11)
    for space in (torus, mobius):
        for _ in range(100):
            p, q = close_pair(space, rng)
            seg = geodesic(p, q)
            lift_mid = p.coords + 0.5 * seg.initial_tangent.components
            got = geodesic_eval(seg, 0.5)
            assert np.allclose(got.coords, space.reduce_c(lift_mid), atol=1e-12)


def test_reduction_into_fundamental_domain(torus, mobius):
    p = torus.point((1.7, -0.25))
    assert np.allclose(p.coords, (0.7, 0.75), atol=1e-15)
    # odd glide power flips y
    m = mobius.point((2.3, 0.1))
    assert np.allclose(m.coords, (0.3, 0.1), atol=1e-15)
    m2 = mobius.point((1.3, 0.1))
    assert np.allclose(m2.coords, (0.3, -0.1), atol=1e-15)


@pytest.mark.parametrize("space_name", ["torus", "mobius"])
def test_metric_properties(space_name, torus, mobius):
    space = {"torus": torus, "mobius": mobius}[space_name]
    rng = np.random.default_rng(23)
    for _ in range(200):
        p, q = close_pair(space, rng)
        v = log(p, q)
        d = dist(p, q)
        # norm consistency and symmetry
        assert abs(v.norm() - d) < 1e-10
        assert abs(d - dist(q, p)) < 1e-10
        # round trip
        back = space.exp(p, v)
        assert space.dist(back, q) < 1e-8


def test_triangle_inequality(torus):
    rng = np.random.default_rng(5)
    pts = [torus.random_point(rng) for _ in range(60)]
    for _ in range(300):
        p, q, r = rng.choice(60, 3)
        dpr = dist(pts[p], pts[r])
        assert dpr <= dist(pts[p], pts[q]) + dist(pts[q], pts[r]) + 1e-9


def test_constant_speed_parameterization(torus):
    rng = np.random.default_rng(17)
    for _ in range(50):
        p, q = close_pair(torus, rng)
        seg = geodesic(p, q)
        s1, s2 = sorted(rng.uniform(0, 1, 2))
        a = geodesic_eval(seg, s1)
        b = geodesic_eval(seg, s2)
        assert abs(dist(a, b) - (s2 - s1) * seg.length) < 1e-7 * max(seg.length, 1e-12)


def test_eval_outside_unit_interval_rejected(torus):
    p, q = torus.point((0.1, 0.1)), torus.point((0.2, 0.3))
    seg = geodesic(p, q)
    with pytest.raises(UsageError):
        geodesic_eval(seg, 1.5)
