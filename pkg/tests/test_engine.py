"""Pursuit integrator: collapse times, symmetry, merging, invariants."""

import math

import numpy as np
import pytest

from geopursuit import (
    IntegratorConfig,
    OutOfInjectivityError,
    PursuitLoop,
    UsageError,
    run_pursuit,
    winding_class,
)


def regular_ngon(n, radius=1.0):
    th = 2 * math.pi * np.arange(n) / n
    return np.column_stack([radius * np.cos(th), radius * np.sin(th)])


def test_two_bugs_meet_halfway_in_half_the_time(euclid2):
    rec = run_pursuit(euclid2, [(0.0, 0.0), (1.0, 0.0)],
                      IntegratorConfig(dt_max=0.005, t_max=1.0))
    assert rec.termination == "all_merged"
    # both run at unit speed toward each other: gap 1 closes at rate 2
    assert rec.capture_time == pytest.approx(0.5, abs=1e-6)
    meet = rec.positions[-1][0]
    assert np.allclose(meet, (0.5, 0.0), atol=1e-6)


def test_equilateral_triangle_collapses_at_two_thirds(euclid2):
    side = 1.0
    pts = regular_ngon(3, radius=side / math.sqrt(3))
    rec = run_pursuit(euclid2, pts, IntegratorConfig(dt_max=0.005, t_max=1.0))
    assert rec.termination == "all_merged"
    assert rec.capture_time == pytest.approx(2.0 / 3.0, abs=1e-3)
    # meeting point is the centroid
    assert np.allclose(rec.positions[-1][0], (0.0, 0.0), atol=1e-4)


def test_unit_square_collapses_at_one(euclid2):
    pts = regular_ngon(4, radius=1.0 / math.sqrt(2))
    rec = run_pursuit(euclid2, pts, IntegratorConfig(dt_max=0.005, t_max=2.0))
    assert rec.termination == "all_merged"
    assert rec.capture_time == pytest.approx(1.0, abs=1e-3)


def test_ngon_stays_regular(euclid2):
    n = 6
    rec = run_pursuit(euclid2, regular_ngon(n),
                      IntegratorConfig(dt_max=0.01, t_max=0.3))
    c, s = math.cos(2 * math.pi / n), math.sin(2 * math.pi / n)
    rot = np.array([[c, -s], [s, c]])
    X = rec.positions[-1]
    # the dynamics commute with the cyclic rotation symmetry
    for k in range(n):
        assert np.allclose(X[k] @ rot.T, X[(k + 1) % n], atol=1e-9)


def test_equally_spaced_loop_on_a_closed_geodesic_translates(torus):
    pts = [(k / 3.0, 0.3) for k in range(3)]
    rec = run_pursuit(torus, pts, IntegratorConfig(dt_max=0.01, t_max=0.5))
    assert rec.termination == "t_max"
    # zero corner angles: the loop slides along its line without shrinking
    assert np.max(rec.theta_max) < 1e-9
    assert np.max(np.abs(rec.l_total - 1.0)) < 1e-9
    final = rec.positions[-1]
    expect = np.array([((k / 3.0 + 0.5) % 1.0, 0.3) for k in range(3)])
    assert np.allclose(final, expect, atol=1e-9)


def test_runs_are_deterministic(euclid3):
    rng = np.random.default_rng(5)
    pts = rng.uniform(0.0, 1.0, (7, 3))
    cfg = dict(dt_max=0.01, t_max=2.0, record_every=3)
    a = run_pursuit(euclid3, pts, IntegratorConfig(**cfg))
    b = run_pursuit(euclid3, pts, IntegratorConfig(**cfg))
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.l_total, b.l_total)
    assert a.termination == b.termination


def test_loop_length_never_increases(euclid3):
    rng = np.random.default_rng(11)
    pts = rng.uniform(0.0, 1.0, (9, 3))
    rec = run_pursuit(euclid3, pts, IntegratorConfig(dt_max=0.02, t_max=30.0))
    drops = np.diff(rec.l_total)
    assert np.all(drops <= 1e-7 * rec.l_total[0])
    assert rec.termination == "all_merged"


def test_rate_integral_tracks_length_change(euclid2):
    rec = run_pursuit(euclid2, regular_ngon(5),
                      IntegratorConfig(dt_max=0.005, t_max=1.0))
    # dl/dt = sum(cos theta - 1) integrated alongside the run
    k = len(rec.times) - 2  # last frame before the capture snap
    gap = (rec.l_total[k] - rec.l_total[0]) - rec.rate_integral[k]
    assert abs(gap) < 1e-4


def test_coincident_bugs_merge_at_start(euclid2):
    pts = [(0.0, 0.0), (0.0, 1e-12), (1.0, 0.0), (0.5, 1.0)]
    loop = PursuitLoop(euclid2, pts, IntegratorConfig(t_max=0.2))
    assert loop.live_reps().size == 3
    assert loop.parent[1] == 0
    kinds = [e.kind for e in loop.events]
    assert kinds.count("capture") == 1
    assert loop.events[0].t == 0.0
    rec = loop.run()
    assert rec.live_count[0] == 3


def test_merged_bugs_ride_with_their_representative(euclid2):
    pts = [(0.0, 0.0), (0.0, 1e-12), (1.0, 0.0), (0.5, 1.0)]
    rec = run_pursuit(euclid2, pts, IntegratorConfig(dt_max=0.01, t_max=0.3))
    for m in range(len(rec.times)):
        assert rec.groups[m][1] == 0
        assert np.array_equal(rec.positions[m][1], rec.positions[m][0])


def test_merge_cascade_is_transitive(euclid2):
    # three mutually coincident bugs collapse to one cluster immediately
    pts = [(0.0, 0.0), (1e-13, 0.0), (0.0, 1e-13), (1.0, 1.0)]
    loop = PursuitLoop(euclid2, pts, IntegratorConfig(t_max=0.1))
    assert loop.live_reps().size == 2
    assert loop.parent[1] == 0 and loop.parent[2] == 0


def test_all_coincident_input_freezes(euclid2):
    pts = [(0.25, 0.25)] * 3
    rec = run_pursuit(euclid2, pts, IntegratorConfig(t_max=1.0))
    assert rec.termination == "all_merged"
    assert rec.capture_time == 0.0
    assert rec.t_final == 0.0
    assert rec.l_total[-1] == 0.0
    assert any(e.kind == "freeze" for e in rec.events)
    assert np.allclose(rec.positions[-1], 0.25)


def test_coarse_capture_eps_rejected(torus):
    pts = [(0.0, 0.1), (0.4, 0.1)]
    with pytest.raises(UsageError):
        PursuitLoop(torus, pts, IntegratorConfig(capture_eps=5e-4))
    # just under the cutoff is allowed
    PursuitLoop(torus, pts, IntegratorConfig(capture_eps=4.9e-4))


def test_initial_gap_at_injectivity_radius_rejected(torus):
    pts = [(0.0, 0.0), (0.5, 0.25)]
    with pytest.raises(OutOfInjectivityError):
        PursuitLoop(torus, pts)


def test_winding_class_is_preserved(torus):
    pts = [(0.0, 0.10), (0.25, 0.14), (0.5, 0.10), (0.75, 0.06)]
    rec = run_pursuit(torus, pts, IntegratorConfig(dt_max=0.01, t_max=2.0, record_every=10))
    for m in range(len(rec.times)):
        reps = np.unique(rec.groups[m])
        w = winding_class(torus, rec.positions[m][reps])
        assert w["class"] == (1, 0)


def test_bad_config_rejected(euclid2):
    with pytest.raises(UsageError):
        IntegratorConfig(dt_max=-1.0).validate()
    with pytest.raises(UsageError):
        IntegratorConfig(step_safety=0.9).validate()
    with pytest.raises(UsageError):
        IntegratorConfig(record_every=0).validate()
    with pytest.raises(UsageError):
        IntegratorConfig(capture_eps=-1e-9).validate()
    with pytest.raises(UsageError):
        PursuitLoop(euclid2, [(0.0, 0.0)])


def test_record_every_thins_frames_but_keeps_the_last(euclid2):
    pts = regular_ngon(4)
    dense = run_pursuit(euclid2, pts, IntegratorConfig(dt_max=0.01, t_max=0.2))
    sparse = run_pursuit(euclid2, pts, IntegratorConfig(dt_max=0.01, t_max=0.2, record_every=5))
    assert len(sparse.times) < len(dense.times)
    assert sparse.times[-1] == pytest.approx(dense.times[-1])
    assert np.allclose(sparse.positions[-1], dense.positions[-1], atol=1e-12)


def test_stop_on_converged_ends_translating_run(torus):
    pts = [(k / 3.0, 0.3) for k in range(3)]
    cfg = IntegratorConfig(dt_max=0.01, t_max=50.0, stop_on_converged=True,
                           converged_angle=1e-6, check_every=0.5)
    rec = run_pursuit(torus, pts, cfg)
    assert rec.termination == "converged"
    assert rec.t_final < 1.0


def test_capture_eps_scales_with_initial_size(euclid2):
    small = PursuitLoop(euclid2, [(0.0, 0.0), (1e-3, 0.0)])
    big = PursuitLoop(euclid2, [(0.0, 0.0), (1e3, 0.0)])
    assert small.capture_eps == pytest.approx(1e-9 * 2e-3)
    assert big.capture_eps == pytest.approx(1e-9 * 2e3)


def test_capture_eps_uses_injectivity_on_bounded_spaces(torus):
    loop = PursuitLoop(torus, [(0.0, 0.0), (0.2, 0.0), (0.4, 0.0)])
    assert loop.capture_eps == pytest.approx(1e-9 * 0.5)
