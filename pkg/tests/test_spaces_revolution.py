"""Dumbbell surface of revolution: shooting geodesics and their invariants.

Independent checks lean on two conserved quantities of geodesic flow on a
surface of revolution: unit speed and the angular momentum r(z)^2 dphi/ds.
"""

import math

import numpy as np
import pytest

from geopursuit import (
    DomainExitError,
    OutOfInjectivityError,
    UsageError,
    dist,
    end_tangent,
    geodesic,
    geodesic_eval,
    log,
)
from conftest import close_pair


def unit_speed_error(space, points, velocities):
    E, G = space.metric_coeffs(points[:, 0])
    speed2 = E * velocities[:, 0] ** 2 + G * velocities[:, 1] ** 2
    return float(np.max(np.abs(speed2 - 1.0)))


def test_profile_shape(dumbbell):
    assert dumbbell.radius(0.0) == pytest.approx(0.4)
    assert dumbbell.neck_radius == pytest.approx(0.4)
    assert dumbbell.radius(2.0) == pytest.approx(1.0 - 0.6 * math.exp(-4.0))
    assert dumbbell.radius_slope(0.0) == 0.0
    assert dumbbell.shortest_closed_geodesic == pytest.approx(0.8 * math.pi)


def test_meridian_launch_keeps_phi_constant(dumbbell):
    p = dumbbell.point((-0.5, 1.0))
    v = dumbbell.tangent(p, (0.6, 0.0))
    fracs, pts, vels = dumbbell.geodesic_ivp(p, v)
    assert np.max(np.abs(pts[:, 1] - 1.0)) < 1e-12
    assert np.all(np.diff(pts[:, 0]) > 0)
    L = v.norm()
    assert unit_speed_error(dumbbell, pts, vels) < 1e-8 * max(1.0, L)


def test_neck_parallel_is_a_closed_geodesic(dumbbell):
    p = dumbbell.point((0.0, 0.0))
    v = dumbbell.tangent(p, (0.0, 1.0))
    assert v.norm() == pytest.approx(0.4)
    fracs, pts, vels = dumbbell.geodesic_ivp(p, v)
    # r'(0) = 0, so the parallel at the neck carries geodesics
    assert np.max(np.abs(pts[:, 0])) < 1e-10
    assert pts[-1, 1] == pytest.approx(1.0, abs=1e-10)


def test_angular_momentum_conserved_along_geodesics(dumbbell):
    rng = np.random.default_rng(12)
    for _ in range(25):
        p = dumbbell.random_point(rng)
        psi = rng.uniform(-math.pi, math.pi)
        scale = rng.uniform(0.2, 1.0)
        vz, vphi = dumbbell._launch_components(p.coords[0], psi)
        v = dumbbell.tangent(p, (scale * vz, scale * vphi))
        try:
            fracs, pts, vels = dumbbell.geodesic_ivp(p, v)
        except DomainExitError:
            continue
        c = dumbbell.clairaut_values(pts, vels)
        assert np.max(np.abs(c - c[0])) < 1e-6 * (1.0 + v.norm())
        assert unit_speed_error(dumbbell, pts, vels) < 1e-8 * (1.0 + v.norm())


def test_log_on_shared_meridian_has_no_angular_part(dumbbell):
    p = dumbbell.point((-0.3, 0.7))
    q = dumbbell.point((0.1, 0.7))
    v = log(p, q)
    assert abs(v.components[1]) < 1e-9
    expect = dumbbell.meridian_length(0.1) - dumbbell.meridian_length(-0.3)
    assert v.norm() == pytest.approx(expect, abs=1e-6)
    assert dist(p, q) == pytest.approx(expect, abs=1e-6)


def test_log_along_neck_matches_arc_length(dumbbell):
    p = dumbbell.point((0.0, 0.0))
    q = dumbbell.point((0.0, 0.3))
    v = log(p, q)
    assert abs(v.components[0]) < 1e-9
    assert v.norm() == pytest.approx(0.4 * 0.3, abs=1e-9)
    assert dist(p, q) == pytest.approx(0.12, abs=1e-7)


def test_exp_log_roundtrip_random_pairs(dumbbell):
    rng = np.random.default_rng(21)
    for _ in range(40):
        p, q = close_pair(dumbbell, rng)
        v = log(p, q)
        back = dumbbell.exp(p, v)
        err = math.hypot(back.coords[0] - q.coords[0],
                         0.4 * (back.coords[1] - q.coords[1]))
        assert err < 1e-6
        assert abs(v.norm() - dist(p, q)) < 1e-7


def test_geodesic_eval_interpolates_the_shooting_path(dumbbell):
    p = dumbbell.point((-0.2, 0.2))
    q = dumbbell.point((0.15, 0.8))
    seg = geodesic(p, q)
    fracs, pts, vels = dumbbell.geodesic_ivp(p, seg.initial_tangent)
    # same launch, same path: spot-check interior fractions
    for s in (0.1, 0.25, 0.5, 0.75, 0.9):
        x = geodesic_eval(seg, s)
        k = int(round(s * (len(pts) - 1)))
        ref = dumbbell.reduce_c(pts[k])
        assert np.allclose(x.coords, ref, atol=1e-7)
    # endpoint tangent agrees with the integrated final velocity
    e = end_tangent(seg)
    assert e.norm() == pytest.approx(seg.length, abs=1e-9)
    unit = vels[-1]
    assert np.allclose(e.components / seg.length, unit, atol=1e-7)


def test_geodesic_eval_has_constant_speed(dumbbell):
    # crosses the phi seam
    p = dumbbell.point((0.3, 6.0))
    q = dumbbell.point((0.55, 0.2))
    seg = geodesic(p, q)
    samples = np.linspace(0.0, 1.0, 11)
    pts = [geodesic_eval(seg, s) for s in samples]
    for a, b in zip(pts[:-1], pts[1:]):
        d = dist(a, b)
        assert d == pytest.approx(seg.length / 10, abs=1e-6)


def test_warm_start_carries_reproduce_cold_solves(dumbbell):
    rng = np.random.default_rng(31)
    pairs = [close_pair(dumbbell, rng) for _ in range(8)]
    P = np.array([p.coords for p, _ in pairs])
    Q = np.array([q.coords for _, q in pairs])
    V0, D0, E0, carries = dumbbell.chase_logs(P, Q)
    assert carries is not None and len(carries) == len(pairs)
    V1, D1, E1, _ = dumbbell.chase_logs(P, Q, guesses=carries)
    assert np.allclose(V0, V1, atol=1e-10)
    assert np.allclose(D0, D1, atol=1e-10)
    assert np.allclose(E0, E1, atol=1e-10)


def test_chase_logs_agree_with_scalar_log(dumbbell):
    rng = np.random.default_rng(32)
    pairs = [close_pair(dumbbell, rng) for _ in range(6)]
    P = np.array([p.coords for p, _ in pairs])
    Q = np.array([q.coords for _, q in pairs])
    V, D, E, _ = dumbbell.chase_logs(P, Q)
    for k, (p, q) in enumerate(pairs):
        v = log(p, q)
        assert np.allclose(V[k], v.components, atol=1e-7)
        assert D[k] == pytest.approx(v.norm(), abs=1e-8)


def test_geodesic_leaving_working_interval_rejected(dumbbell):
    p = dumbbell.point((1.5, 0.0))
    v = dumbbell.tangent(p, (1.0, 0.0))
    with pytest.raises(DomainExitError):
        dumbbell.exp(p, v)
    with pytest.raises(DomainExitError):
        dumbbell.geodesic_ivp(p, v)


def test_points_outside_working_interval_rejected(dumbbell):
    with pytest.raises(UsageError):
        dumbbell.point((2.5, 0.0))


def test_phi_wraps_into_standard_interval(dumbbell):
    p = dumbbell.point((0.5, 7.0))
    assert p.coords[1] == pytest.approx(7.0 - 2 * math.pi)


def test_row_distances_saturate_far_pairs(dumbbell):
    A = np.array([
        [0.1, 1.0],        # tiny gap: metric chord, no solve
        [-1.0, 0.0],       # far pair: chord already past the bound
        [0.0, 0.0],        # half-circle apart at the neck
        [0.3, 0.0],        # mid-range: coarse solve, exact
    ])
    B = np.array([
        [0.1, 1.0 + 2.5e-8],
        [1.0, 0.0],
        [0.0, math.pi],
        [0.5, 0.4],
    ])
    out = dumbbell.dist_rows(A, B)
    assert out[0] == pytest.approx(dumbbell.radius(0.1) * 2.5e-8, rel=1e-9)
    assert out[1] == pytest.approx(2.0)            # lower bound, not the true dist
    assert out[2] == pytest.approx(0.4 * math.pi)  # lower bound, not the true dist
    assert out[3] == pytest.approx(dumbbell.dist_c(A[3], B[3]), abs=1e-12)
    # saturated rows never dip below the injectivity bound
    assert np.all(out[1:3] >= dumbbell.injectivity_radius)
